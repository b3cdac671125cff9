#include "kentropy/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "kentropy/errors.hpp"

namespace kentropy {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// --- deterministic uniform/normal helpers -------------------------------

double uniform01(std::mt19937_64& rng) {
  // 53 mantissa bits, strictly inside (0, 1); avoids distribution objects,
  // whose rounding is implementation-defined
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double normal(std::mt19937_64& rng, bool& have_spare, double& spare) {
  if (have_spare) {
    have_spare = false;
    return spare;
  }
  const double u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  const double r = std::sqrt(-2.0 * std::log(u1));
  have_spare = true;
  spare = r * std::sin(2.0 * kPi * u2);
  return r * std::cos(2.0 * kPi * u2);
}

// --- Halton low-discrepancy sequence -------------------------------------

constexpr int kHaltonPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23};

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base, frac = inv_base, result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * frac;
    index /= base;
    frac *= inv_base;
  }
  return result;
}

// Quasi-uniform samples in the axis-aligned ellipsoid with the given
// (metric-reduced) semi-axes: Halton uniforms -> Box-Muller direction plus a
// u^(1/N) radius.  Rows are samples.
Eigen::MatrixXd ellipsoid_samples(const std::vector<double>& axes, long budget,
                                  std::uint64_t seed) {
  const int n = static_cast<int>(axes.size());
  const int pairs = (n + 1) / 2;
  const int dims = 2 * pairs + 1;
  if (dims > static_cast<int>(sizeof(kHaltonPrimes) / sizeof(int)))
    throw ParameterError("ellipsoid sampling supports dimension <= 8");
  const std::uint64_t offset = 64 + seed % 1048576;

  Eigen::MatrixXd pts(budget, n);
  std::vector<double> z(static_cast<size_t>(2 * pairs));
  for (long s = 0; s < budget; ++s) {
    const std::uint64_t idx = offset + static_cast<std::uint64_t>(s);
    for (int p = 0; p < pairs; ++p) {
      const double u1 = radical_inverse(idx, kHaltonPrimes[2 * p]);
      const double u2 = radical_inverse(idx, kHaltonPrimes[2 * p + 1]);
      const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
      z[static_cast<size_t>(2 * p)] = r * std::cos(2.0 * kPi * u2);
      z[static_cast<size_t>(2 * p + 1)] = r * std::sin(2.0 * kPi * u2);
    }
    double norm_sq = 0.0;
    for (int i = 0; i < n; ++i) norm_sq += z[static_cast<size_t>(i)] * z[static_cast<size_t>(i)];
    const double norm = std::sqrt(std::max(norm_sq, 1e-300));
    const double u_r = radical_inverse(idx, kHaltonPrimes[dims - 1]);
    const double radius = std::pow(std::max(u_r, 1e-300), 1.0 / n);
    for (int i = 0; i < n; ++i)
      pts(s, i) = axes[static_cast<size_t>(i)] * radius * z[static_cast<size_t>(i)] / norm;
  }
  return pts;
}

// --- spatial hash over cells of size h; collisions only add distance checks

std::uint64_t cell_key(const Eigen::MatrixXd& pts, long row, double h,
                       const std::vector<int>* off = nullptr) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (long i = 0; i < pts.cols(); ++i) {
    std::int64_t c = static_cast<std::int64_t>(std::floor(pts(row, i) / h));
    if (off) c += (*off)[static_cast<size_t>(i)];
    auto bits = static_cast<std::uint64_t>(c);
    for (int b = 0; b < 8; ++b) {
      hash ^= (bits >> (8 * b)) & 0xffULL;
      hash *= 1099511628211ULL;
    }
  }
  return hash;
}

// visits {-1,0,1}^n via an odometer
bool next_offset(std::vector<int>& off) {
  for (size_t i = 0; i < off.size(); ++i) {
    if (off[i] < 1) {
      ++off[i];
      return true;
    }
    off[i] = -1;
  }
  return false;
}

std::vector<double> reduced_axes(const EllipsoidInstance& instance) {
  instance.validate();
  std::vector<double> axes = instance.semi_axes;
  if (!instance.metric_weights.empty()) {
    // the weighted metric sum x_i^2 / w_i is euclidean in y_i = x_i / sqrt(w_i)
    for (size_t i = 0; i < axes.size(); ++i)
      axes[i] /= std::sqrt(instance.metric_weights[i]);
  }
  return axes;
}

void check_probe_args(const EllipsoidInstance& instance, double eps, long budget) {
  if (instance.dim() > 8)
    throw ParameterError("covering probes support dimension <= 8");
  if (!(eps > 0.0)) throw ParameterError("covering probes need eps > 0");
  if (budget < 1) throw ParameterError("covering probes need a positive sample budget");
}

}  // namespace

void EllipsoidInstance::validate() const {
  if (semi_axes.empty()) throw ParameterError("ellipsoid must have dimension >= 1");
  for (size_t i = 0; i < semi_axes.size(); ++i) {
    if (!(semi_axes[i] > 0.0)) throw ParameterError("ellipsoid semi-axes must be positive");
    if (i > 0 && semi_axes[i] > semi_axes[i - 1])
      throw ParameterError("ellipsoid semi-axes must be descending");
  }
  if (!metric_weights.empty()) {
    if (metric_weights.size() != semi_axes.size())
      throw ParameterError("metric weight count must match the dimension");
    for (double w : metric_weights)
      if (!(w > 0.0)) throw ParameterError("metric weights must be positive");
  }
}

GramSpectrum gram_spectrum(const KernelSpec& spec, const Domain& domain,
                           const Eigen::MatrixXd& points) {
  if (points.rows() < 1) throw ParameterError("gram_spectrum needs at least one point");
  const long m = points.rows();
  Eigen::MatrixXd gram(m, m);
  for (long i = 0; i < m; ++i) {
    for (long j = 0; j <= i; ++j) {
      const double v =
          eval_kernel(spec, domain, points.row(i).transpose(), points.row(j).transpose());
      gram(i, j) = v;
      gram(j, i) = v;
    }
  }
  gram /= static_cast<double>(m);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw NumericError("gram_spectrum: eigensolve failed");

  GramSpectrum out;
  out.points = points;
  out.eigenvalues.resize(static_cast<size_t>(m));
  for (long j = 0; j < m; ++j)
    out.eigenvalues[static_cast<size_t>(j)] = std::max(solver.eigenvalues()(m - 1 - j), 0.0);
  out.c_x = std::sqrt(out.eigenvalues.front());
  return out;
}

double rademacher_g(double x) {
  if (!(x >= 0.0)) throw ParameterError("rademacher_g: argument must be non-negative");
  if (x <= 1.0) return 2.0 * x;  // linear branch; never evaluates ln at 0
  return std::log(x) + 2.0;
}

double rademacher_bound(const GramSpectrum& gram) {
  const double m = static_cast<double>(gram.eigenvalues.size());
  if (!(gram.c_x > 0.0)) return 0.0;
  double sum = 0.0;
  for (double lam : gram.eigenvalues) {
    const double delta_p = lam * gram.c_x;  // lambda_p^X * sqrt(lambda_1^X)
    sum += rademacher_g(2.0 * delta_p / gram.c_x);
  }
  return 6.0 * gram.c_x / std::sqrt(m) * std::sqrt(sum);
}

McEstimate rademacher_mc(const KernelSpec& spec, const Domain& domain,
                         const Eigen::MatrixXd& points, long trials, std::uint64_t seed) {
  if (trials < 1) throw ParameterError("rademacher_mc: trials must be >= 1");
  const long m = points.rows();
  Eigen::MatrixXd gram(m, m);
  for (long i = 0; i < m; ++i)
    for (long j = 0; j <= i; ++j) {
      const double v =
          eval_kernel(spec, domain, points.row(i).transpose(), points.row(j).transpose());
      gram(i, j) = v;
      gram(j, i) = v;
    }

  std::mt19937_64 rng(seed);
  std::uint64_t bits = 0;
  int bits_left = 0;
  auto next_sign = [&]() -> double {
    if (bits_left == 0) {
      bits = rng();
      bits_left = 64;
    }
    const double s = (bits & 1ULL) ? 1.0 : -1.0;
    bits >>= 1;
    --bits_left;
    return s;
  };

  const long batch = 256;
  Eigen::MatrixXd signs(m, batch);
  double sum = 0.0, sum_sq = 0.0;
  long done = 0;
  while (done < trials) {
    const long cur = std::min(batch, trials - done);
    for (long t = 0; t < cur; ++t)
      for (long i = 0; i < m; ++i) signs(i, t) = next_sign();
    const Eigen::MatrixXd prod = gram * signs.leftCols(cur);
    for (long t = 0; t < cur; ++t) {
      const double quad = signs.col(t).dot(prod.col(t));
      const double v = std::sqrt(std::max(quad, 0.0)) / static_cast<double>(m);
      sum += v;
      sum_sq += v * v;
    }
    done += cur;
  }
  McEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var =
        std::max(sum_sq - sum * sum / static_cast<double>(trials), 0.0) /
        static_cast<double>(trials - 1);
    est.std_error = std::sqrt(var / static_cast<double>(trials));
  }
  return est;
}

long greedy_cover(const EllipsoidInstance& instance, double eps, long sample_budget,
                  std::uint64_t seed) {
  check_probe_args(instance, eps, sample_budget);
  const std::vector<double> axes = reduced_axes(instance);
  const Eigen::MatrixXd pts = ellipsoid_samples(axes, sample_budget, seed);
  const long n_pts = pts.rows();
  const double h = eps, eps_sq = eps * eps;

  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> cells;
  cells.reserve(static_cast<size_t>(n_pts) * 2);
  for (long s = 0; s < n_pts; ++s)
    cells[cell_key(pts, s, h)].push_back(static_cast<std::int32_t>(s));

  std::vector<char> covered(static_cast<size_t>(n_pts), 0);
  std::vector<int> off(axes.size());
  long count = 0;
  for (long s = 0; s < n_pts; ++s) {
    if (covered[static_cast<size_t>(s)]) continue;
    ++count;
    std::fill(off.begin(), off.end(), -1);
    do {
      auto it = cells.find(cell_key(pts, s, h, &off));
      if (it == cells.end()) continue;
      for (std::int32_t idx : it->second) {
        if (covered[static_cast<size_t>(idx)]) continue;
        if ((pts.row(idx) - pts.row(s)).squaredNorm() <= eps_sq)
          covered[static_cast<size_t>(idx)] = 1;
      }
    } while (next_offset(off));
  }
  return count;
}

long greedy_pack(const EllipsoidInstance& instance, double eps, long sample_budget,
                 std::uint64_t seed) {
  check_probe_args(instance, eps, sample_budget);
  const std::vector<double> axes = reduced_axes(instance);
  const Eigen::MatrixXd pts = ellipsoid_samples(axes, sample_budget, seed);
  const long n_pts = pts.rows();
  const double sep = 2.0 * eps, sep_sq = sep * sep;

  std::unordered_map<std::uint64_t, std::vector<std::int32_t>> kept_cells;
  kept_cells.reserve(static_cast<size_t>(n_pts));
  std::vector<int> off(axes.size());
  long count = 0;
  for (long s = 0; s < n_pts; ++s) {
    bool blocked = false;
    std::fill(off.begin(), off.end(), -1);
    do {
      auto it = kept_cells.find(cell_key(pts, s, sep, &off));
      if (it == kept_cells.end()) continue;
      for (std::int32_t idx : it->second) {
        if ((pts.row(idx) - pts.row(s)).squaredNorm() <= sep_sq) {
          blocked = true;
          break;
        }
      }
    } while (!blocked && next_offset(off));
    if (!blocked) {
      kept_cells[cell_key(pts, s, sep)].push_back(static_cast<std::int32_t>(s));
      ++count;
    }
  }
  return count;
}

long function_cover_probe(const EigenSystem& system, int n_keep, double eps,
                          long sample_budget, std::uint64_t seed) {
  if (n_keep < 1 || n_keep > 6)
    throw ParameterError("function_cover_probe: n_keep must lie in [1, 6]");
  if (n_keep > static_cast<int>(system.spectrum.size()))
    throw ParameterError("function_cover_probe: n_keep exceeds available eigenpairs");
  if (!(eps > 0.0)) throw ParameterError("function_cover_probe: eps must be positive");
  if (sample_budget < 1)
    throw ParameterError("function_cover_probe: sample budget must be positive");

  // coefficient vectors xi in the unit ball realize f = sum_i xi_i sqrt(l_i) phi_i
  const std::vector<double> unit_axes(static_cast<size_t>(n_keep), 1.0);
  const Eigen::MatrixXd xi = ellipsoid_samples(unit_axes, sample_budget, seed);
  Eigen::VectorXd sigma(n_keep);
  for (int i = 0; i < n_keep; ++i)
    sigma(i) = std::sqrt(system.spectrum.values[static_cast<size_t>(i)]);
  // rows: samples, cols: grid nodes
  const Eigen::MatrixXd values =
      (xi * sigma.asDiagonal()) * system.eigvecs.leftCols(n_keep).transpose();

  const long n_pts = values.rows();
  std::vector<char> covered(static_cast<size_t>(n_pts), 0);
  long count = 0;
  for (long s = 0; s < n_pts; ++s) {
    if (covered[static_cast<size_t>(s)]) continue;
    ++count;
    for (long t = 0; t < n_pts; ++t) {
      if (covered[static_cast<size_t>(t)]) continue;
      if ((values.row(t) - values.row(s)).cwiseAbs().maxCoeff() <= eps)
        covered[static_cast<size_t>(t)] = 1;
    }
  }
  return count;
}

GrfSample kkl_sample(const EigenSystem& system, int n_modes, std::uint64_t seed,
                     bool zero_coefficients) {
  if (n_modes < 1 || n_modes > static_cast<int>(system.spectrum.size()))
    throw ParameterError("kkl_sample: n_modes exceeds available eigenpairs");

  GrfSample sample;
  sample.coefficients = Eigen::VectorXd::Zero(n_modes);
  if (!zero_coefficients) {
    std::mt19937_64 rng(seed);
    bool have_spare = false;
    double spare = 0.0;
    for (int i = 0; i < n_modes; ++i)
      sample.coefficients(i) = normal(rng, have_spare, spare);
  }
  Eigen::VectorXd scaled(n_modes);
  for (int i = 0; i < n_modes; ++i)
    scaled(i) =
        std::sqrt(system.spectrum.values[static_cast<size_t>(i)]) * sample.coefficients(i);
  sample.field_values = system.eigvecs.leftCols(n_modes) * scaled;
  return sample;
}

namespace {

double chi_log_pdf(double x, int n_dof) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  return (n_dof - 1) * std::log(x) - 0.5 * x * x -
         (0.5 * n_dof - 1.0) * std::log(2.0) - std::lgamma(0.5 * n_dof);
}

double chi_pdf(double x, int n_dof) {
  const double lp = chi_log_pdf(x, n_dof);
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(int n_dof, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = chi_pdf(lm, n_dof), frm = chi_pdf(rm, n_dof);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(n_dof, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(n_dof, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double cell_mass(int n_dof, double a, double b) {
  const double fa = chi_pdf(a, n_dof);
  const double fb = chi_pdf(b, n_dof);
  const double fm = chi_pdf(0.5 * (a + b), n_dof);
  return adaptive_simpson(n_dof, a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), 1e-12, 40);
}

}  // namespace

double chi_quantizer_entropy(int n_dof, double step) {
  if (n_dof < 1) throw ParameterError("chi_quantizer_entropy: n_dof must be >= 1");
  if (!(step > 0.0)) throw ParameterError("chi_quantizer_entropy: step must be positive");

  const double mode = std::sqrt(std::max(static_cast<double>(n_dof - 1), 0.0));
  double entropy = 0.0;
  for (long k = 0; k < 2000000; ++k) {
    const double a = static_cast<double>(k) * step;
    const double b = a + step;
    const double p = cell_mass(n_dof, a, b);
    if (p > 0.0) entropy -= p * std::log(p);
    if (b > mode && p < 1e-16) break;
  }
  return entropy;
}

double estimate_universal_c(const std::vector<int>& n_dof_list,
                            const std::vector<double>& step_list) {
  if (n_dof_list.empty() || step_list.empty())
    throw ParameterError("estimate_universal_c: grids must be nonempty");
  double best = 0.0;
  for (int n_dof : n_dof_list) {
    for (double step : step_list) {
      if (!(step > 0.0 && step < 1.0))
        throw ParameterError("estimate_universal_c: steps must lie in (0, 1)");
      best = std::max(best, chi_quantizer_entropy(n_dof, step) / std::log(1.0 / step));
    }
  }
  return best;
}

}  // namespace kentropy
