#pragma once

#include <Eigen/Dense>

#include <variant>
#include <vector>

#include "kentropy/errors.hpp"

namespace kentropy {

// K(x, y) = exp(-sigma^2 * |x - y|^2)
struct GaussianKernel {
  double sigma = 1.0;
};

// Kernel known only through its values on a fixed node set (one node per
// row).  The nodes are the only admissible evaluation points.
struct TabulatedKernel {
  Eigen::MatrixXd nodes;
  Eigen::MatrixXd values;
};

using KernelSpec = std::variant<GaussianKernel, TabulatedKernel>;

// Throws ParameterError / ConfigError when the spec is unusable
// (non-positive sigma, asymmetric table, shape mismatch).
void validate_kernel(const KernelSpec& spec);

// Axis-aligned box; row d holds {lo, hi}.
struct Domain {
  Eigen::MatrixX2d box;

  int dim() const { return static_cast<int>(box.rows()); }
  double volume() const;
  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  void validate() const;
};

enum class MeasureKind { UniformNormalized, UniformLebesgue, Empirical };

struct Measure {
  MeasureKind kind = MeasureKind::UniformLebesgue;
  Eigen::MatrixXd points;  // support of the empirical measure, one per row

  double total_mass(const Domain& domain) const;
};

// Quadrature nodes (one per row) and weights; the weights sum to the total
// mass of the measure.
struct Grid {
  Eigen::MatrixXd nodes;
  Eigen::VectorXd weights;

  long size() const { return nodes.rows(); }
};

// Gauss-Legendre rule with n points on [a, b], Lebesgue-normalized weights
// (they sum to b - a).  Computed via the Golub-Welsch eigenproblem.
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

// Tensor Gauss-Legendre grid for the uniform measures; the empirical
// measure returns its own points with weight 1/m each.  Throws
// ResourceError when nodes_per_dim^dim exceeds max_nodes.
Grid build_grid(const Domain& domain, const Measure& measure, int nodes_per_dim,
                long max_nodes = 200000);

double eval_kernel(const KernelSpec& spec, const Domain& domain,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& y);

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Domain& domain,
                              const Grid& grid);

// D_K = sup_x sqrt(K(x, x)).  Exactly 1 for the Gaussian family; grid
// maximum for tabulated kernels (their grid is their domain).
double sup_diag(const KernelSpec& spec, const Domain& domain, const Grid& grid);

}  // namespace kentropy
