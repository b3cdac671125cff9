#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "kentropy/kernel.hpp"
#include "kentropy/spectrum.hpp"

namespace kentropy {

// Eigenvalues of the normalized kernel matrix (1/m)[K(x_i, x_j)] of a point
// set, the input of the Rademacher-complexity certificate.
struct GramSpectrum {
  std::vector<double> eigenvalues;  // descending, clipped at 0
  Eigen::MatrixXd points;           // one row per point
  double c_x = 0.0;                 // sqrt of the top eigenvalue
};

GramSpectrum gram_spectrum(const KernelSpec& spec, const Domain& domain,
                           const Eigen::MatrixXd& points);

// Capacity kernel of the certificate: 2x for x <= 1, ln(x) + 2 for x > 1.
// The two branches agree at x = 1; the logarithmic branch only wins past it.
double rademacher_g(double x);

// Closed-form bound (6 c_X / sqrt(m)) * sqrt(sum_p g(2 delta_p / c_X)) with
// delta_p = lambda_p^X * sqrt(lambda_1^X).
double rademacher_bound(const GramSpectrum& gram);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

// Monte-Carlo Rademacher complexity: averages sqrt(sigma' G sigma) / m over
// i.i.d. sign vectors (G the unnormalized kernel matrix); the per-draw value
// is the exact dual-norm supremum over the unit ball.  Bit-reproducible for a
// given seed.
McEstimate rademacher_mc(const KernelSpec& spec, const Domain& domain,
                         const Eigen::MatrixXd& points, long trials, std::uint64_t seed);

// Axis-aligned ellipsoid { x : sum_i x_i^2 / a_i^2 <= 1 }.  An empty
// metric_weights means the euclidean metric; otherwise distances are
// ||x||^2 = sum_i x_i^2 / w_i.
struct EllipsoidInstance {
  std::vector<double> semi_axes;  // descending, positive
  std::vector<double> metric_weights;

  int dim() const { return static_cast<int>(semi_axes.size()); }
  void validate() const;
};

// Greedy covering of quasi-uniform samples: returns the number of centers
// needed so every sample lies within eps of one (empirical probe of the
// internal covering number).
long greedy_cover(const EllipsoidInstance& instance, double eps, long sample_budget,
                  std::uint64_t seed);

// Greedy maximal point set with pairwise separation > 2*eps; its size
// lower-bounds the external covering number at radius eps.
long greedy_pack(const EllipsoidInstance& instance, double eps, long sample_budget,
                 std::uint64_t seed);

// Greedy sup-norm covering of the mode-truncated unit ball in function space,
// sampled through coefficient vectors; returns the center count.
long function_cover_probe(const EigenSystem& system, int n_keep, double eps,
                          long sample_budget, std::uint64_t seed);

// One draw of the random field sum_i sqrt(lambda_i) xi_i phi_i with
// independent standard normal coefficients.
struct GrfSample {
  Eigen::VectorXd coefficients;  // the xi_i draws
  Eigen::VectorXd field_values;  // field at the grid nodes

  double rkhs_norm_sq() const { return coefficients.squaredNorm(); }
};

GrfSample kkl_sample(const EigenSystem& system, int n_modes, std::uint64_t seed,
                     bool zero_coefficients = false);

// Shannon entropy (nats) of step * floor(Z / step) for Z chi-distributed with
// n_dof degrees of freedom; cell masses by adaptive Simpson quadrature.
double chi_quantizer_entropy(int n_dof, double step);

// max over the (n_dof, step) grid of entropy / ln(1/step): an empirical value
// for the universal constant of the quantizer-entropy bound.
double estimate_universal_c(const std::vector<int>& n_dof_list,
                            const std::vector<double>& step_list);

}  // namespace kentropy
