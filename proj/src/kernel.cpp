#include "kentropy/kernel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

namespace kentropy {

void validate_kernel(const KernelSpec& spec) {
  if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
    if (!(g->sigma > 0.0) || !std::isfinite(g->sigma)) {
      throw ParameterError("gaussian kernel needs sigma > 0");
    }
    return;
  }
  const auto& t = std::get<TabulatedKernel>(spec);
  const long m = t.nodes.rows();
  if (m == 0) throw ConfigError("tabulated kernel has no nodes");
  if (t.values.rows() != m || t.values.cols() != m) {
    throw ConfigError("tabulated kernel: value matrix must be m x m for m nodes");
  }
  const double scale = std::max(1.0, t.values.cwiseAbs().maxCoeff());
  for (long i = 0; i < m; ++i) {
    for (long j = i + 1; j < m; ++j) {
      if (std::abs(t.values(i, j) - t.values(j, i)) > 1e-12 * scale) {
        throw ConfigError("tabulated kernel: value matrix is not symmetric");
      }
    }
  }
}

double Domain::volume() const {
  double v = 1.0;
  for (long d = 0; d < box.rows(); ++d) v *= box(d, 1) - box(d, 0);
  return v;
}

bool Domain::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != box.rows()) return false;
  for (long d = 0; d < box.rows(); ++d) {
    if (x[d] < box(d, 0) - tol || x[d] > box(d, 1) + tol) return false;
  }
  return true;
}

void Domain::validate() const {
  if (box.rows() < 1) throw ConfigError("domain box needs at least one interval");
  for (long d = 0; d < box.rows(); ++d) {
    if (!(box(d, 0) < box(d, 1))) {
      throw ConfigError("domain box interval " + std::to_string(d) +
                        " must have lo < hi");
    }
  }
}

double Measure::total_mass(const Domain& domain) const {
  switch (kind) {
    case MeasureKind::UniformNormalized:
      return 1.0;
    case MeasureKind::UniformLebesgue:
      return domain.volume();
    case MeasureKind::Empirical:
      return 1.0;
  }
  throw ParameterError("unknown measure kind");
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  if (n < 1) throw ParameterError("gauss_legendre needs n >= 1");
  if (!(a < b)) throw ParameterError("gauss_legendre needs a < b");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  if (n == 1) {
    nodes[0] = 0.5 * (a + b);
    weights[0] = b - a;
    return;
  }
  // Jacobi matrix of the Legendre recurrence; its eigenvalues are the nodes
  // and the squared first eigenvector components give the weights.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double bk = k / std::sqrt(4.0 * k * k - 1.0);
    J(k - 1, k) = bk;
    J(k, k - 1) = bk;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  const Eigen::VectorXd& x = es.eigenvalues();
  const Eigen::MatrixXd& V = es.eigenvectors();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    nodes[i] = mid + half * x[i];
    weights[i] = 2.0 * V(0, i) * V(0, i) * half;
  }
}

Grid build_grid(const Domain& domain, const Measure& measure, int nodes_per_dim,
                long max_nodes) {
  domain.validate();
  const int dim = domain.dim();

  if (measure.kind == MeasureKind::Empirical) {
    const long m = measure.points.rows();
    if (m == 0) throw ConfigError("empirical measure has no points");
    if (measure.points.cols() != dim) {
      throw ConfigError("empirical measure points do not match the domain dimension");
    }
    for (long i = 0; i < m; ++i) {
      if (!domain.contains(measure.points.row(i).transpose())) {
        throw DomainError("empirical measure point outside the domain box");
      }
    }
    Grid grid;
    grid.nodes = measure.points;
    grid.weights = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    return grid;
  }

  if (nodes_per_dim < 1) throw ParameterError("nodes_per_dim must be >= 1");
  double total = 1.0;
  for (int d = 0; d < dim; ++d) {
    total *= nodes_per_dim;
    if (total > static_cast<double>(max_nodes)) {
      throw ResourceError("grid of " + std::to_string(nodes_per_dim) + "^" +
                          std::to_string(dim) + " nodes exceeds the cap of " +
                          std::to_string(max_nodes));
    }
  }
  const long n_total = static_cast<long>(total);

  std::vector<std::vector<double>> xs(dim), ws(dim);
  for (int d = 0; d < dim; ++d) {
    gauss_legendre(nodes_per_dim, domain.box(d, 0), domain.box(d, 1), xs[d], ws[d]);
  }

  const double norm =
      measure.kind == MeasureKind::UniformNormalized ? domain.volume() : 1.0;

  Grid grid;
  grid.nodes.resize(n_total, dim);
  grid.weights.resize(n_total);
  std::vector<int> idx(dim, 0);
  for (long i = 0; i < n_total; ++i) {
    double w = 1.0;
    for (int d = 0; d < dim; ++d) {
      grid.nodes(i, d) = xs[d][idx[d]];
      w *= ws[d][idx[d]];
    }
    grid.weights[i] = w / norm;
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < nodes_per_dim) break;
      idx[d] = 0;
    }
  }
  return grid;
}

namespace {

long tabulated_index(const TabulatedKernel& t, const Eigen::VectorXd& x) {
  for (long i = 0; i < t.nodes.rows(); ++i) {
    if ((t.nodes.row(i).transpose() - x).norm() <= 1e-9) return i;
  }
  throw DomainError("point is not a node of the tabulated kernel");
}

}  // namespace

double eval_kernel(const KernelSpec& spec, const Domain& domain,
                   const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (!domain.contains(x) || !domain.contains(y)) {
    throw DomainError("kernel evaluation point outside the domain box");
  }
  if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
    const double d2 = (x - y).squaredNorm();
    return std::exp(-g->sigma * g->sigma * d2);
  }
  const auto& t = std::get<TabulatedKernel>(spec);
  return t.values(tabulated_index(t, x), tabulated_index(t, y));
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const Domain& domain,
                              const Grid& grid) {
  const long m = grid.size();
  Eigen::MatrixXd K(m, m);
  if (const auto* g = std::get_if<GaussianKernel>(&spec)) {
    const double s2 = g->sigma * g->sigma;
    for (long i = 0; i < m; ++i) {
      K(i, i) = 1.0;
      for (long j = i + 1; j < m; ++j) {
        const double d2 = (grid.nodes.row(i) - grid.nodes.row(j)).squaredNorm();
        K(i, j) = K(j, i) = std::exp(-s2 * d2);
      }
    }
    return K;
  }
  for (long i = 0; i < m; ++i) {
    for (long j = i; j < m; ++j) {
      const double v =
          eval_kernel(spec, domain, grid.nodes.row(i).transpose(),
                      grid.nodes.row(j).transpose());
      K(i, j) = K(j, i) = v;
    }
  }
  return K;
}

double sup_diag(const KernelSpec& spec, const Domain& domain, const Grid& grid) {
  if (std::holds_alternative<GaussianKernel>(spec)) {
    return 1.0;  // K(x, x) = exp(0) on the whole domain
  }
  double best = 0.0;
  for (long i = 0; i < grid.size(); ++i) {
    const Eigen::VectorXd x = grid.nodes.row(i).transpose();
    best = std::max(best, eval_kernel(spec, domain, x, x));
  }
  if (best < 0.0) throw NumericError("negative kernel diagonal");
  return std::sqrt(best);
}

}  // namespace kentropy
