#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "kentropy/kernel.hpp"

namespace kentropy {

// Eigenvalue sequence, sorted descending, all entries >= 0.
struct Spectrum {
  std::vector<double> values;
  std::string source;
  std::string truncation_note;  // non-empty when the enumeration was cut short

  std::size_t size() const { return values.size(); }
  double trace() const;
  // ConfigError on negative entries or ascending order.
  void validate() const;
};

// Spectrum plus eigenfunction samples: column j of eigvecs holds phi_j at
// the grid nodes, orthonormal under the grid weights.
struct EigenSystem {
  Spectrum spectrum;
  Eigen::MatrixXd eigvecs;
};

// Discretized integral-operator eigenproblem: eigendecomposition of
// W^{1/2} K W^{1/2}, eigenvalues clipped at 0, eigenvectors rescaled by
// W^{-1/2} so the phi_j are weighted-orthonormal.
EigenSystem nystrom_spectrum(const KernelSpec& spec, const Domain& domain,
                             const Grid& grid, int k_max);

// Closed-form eigenvalue envelope for the Gaussian kernel on [-1, 1]:
// 8 * ((2/e) * (k - 1))^{-(k-1)/2} * sigma^{k-1}, with 0^0 = 1 at k = 1.
double gaussian_eigen_bound(int k, double sigma);

// First k_max envelope values, sorted descending (the envelope itself is
// not monotone near k = 1).
Spectrum gaussian_bound_spectrum(double sigma, int k_max);

// All products lambda_{i_1} * ... * lambda_{i_n} >= cutoff over index
// tuples, one factor spectrum per tensor dimension, best-first enumeration.
Spectrum tensor_spectrum(const std::vector<Spectrum>& factors, double cutoff,
                         std::size_t max_terms = 2000000);

Spectrum power_law_spectrum(double c, double gamma, std::size_t count);

// Sup over grid nodes of sqrt(max(0, K(x,x) - sum_{j<=n_keep} lambda_j
// phi_j(x)^2)): the uniform remainder after truncating the eigenexpansion.
double mercer_tail(const EigenSystem& system, const KernelSpec& spec,
                   const Domain& domain, const Grid& grid, int n_keep);

// CSV layout: "#kernel-entropy v1" comment, "index,lambda" header,
// 1-based indices.
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);
Spectrum read_spectrum_csv(std::istream& in);

}  // namespace kentropy
