#include "kentropy/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "kentropy/errors.hpp"

namespace kentropy {

double EntropyBoundReport::value_bits() const { return value_nats / std::log(2.0); }

double spectral_sum_E(double eps, const Spectrum& spectrum) {
  if (!(eps > 0.0)) throw ParameterError("spectral_sum_E: epsilon must be positive");
  double sum = 0.0;
  const double log_eps = std::log(eps);
  for (double v : spectrum.values) {
    if (v <= eps) break;  // descending order: nothing further can contribute
    sum += std::log(v) - log_eps;
  }
  return sum;
}

long count_above_m(double eps, const Spectrum& spectrum) {
  if (!(eps > 0.0)) throw ParameterError("count_above_m: epsilon must be positive");
  // strict comparison; values are descending, so find the first index <= eps
  auto it = std::lower_bound(spectrum.values.begin(), spectrum.values.end(), eps,
                             [](double v, double e) { return v > e; });
  return static_cast<long>(it - spectrum.values.begin());
}

double dpp_ellipsoid_bound(const Spectrum& semi_axes, double theta) {
  if (!(theta > 0.0 && theta < 0.5))
    throw ParameterError("dpp_ellipsoid_bound: theta must lie in (0, 0.5)");
  // mu_theta counts axes >= 1 - theta (non-strict), unlike the strict m_eps
  long mu = 0;
  const double thresh = 1.0 - theta;
  for (double a : semi_axes.values) {
    if (a >= thresh)
      ++mu;
    else
      break;
  }
  return spectral_sum_E(1.0, semi_axes) + static_cast<double>(mu) * std::log(3.0 / theta);
}

std::vector<double> default_theta_grid() {
  std::vector<double> grid;
  grid.reserve(49);
  for (int i = 1; i <= 49; ++i) grid.push_back(i / 100.0);
  return grid;
}

EntropyBoundReport upper_bound_main(double eps, const Spectrum& spectrum, double scale,
                                    const std::vector<double>& theta_grid,
                                    const std::string& convention) {
  if (!(eps > 0.0)) throw ParameterError("upper_bound_main: epsilon must be positive");
  if (!(scale > 0.0)) throw ParameterError("upper_bound_main: scale must be positive");
  if (theta_grid.empty()) throw ParameterError("upper_bound_main: theta grid is empty");

  const double eps_scaled = eps / scale;
  const double e_term = spectral_sum_E(eps_scaled, spectrum);

  double best = std::numeric_limits<double>::infinity();
  double best_theta = 0.0;
  long best_m = 0;
  for (double theta : theta_grid) {
    if (!(theta > 0.0 && theta < 0.5))
      throw ParameterError("upper_bound_main: theta grid entries must lie in (0, 0.5)");
    const long m = count_above_m((1.0 - theta) * eps_scaled, spectrum);
    const double v = e_term + static_cast<double>(m) * std::log(3.0 / theta);
    if (v < best) {  // strict: ties resolve to the lowest theta in grid order
      best = v;
      best_theta = theta;
      best_m = m;
    }
  }

  EntropyBoundReport rep;
  rep.epsilon = eps;
  rep.effective_radius = eps;
  rep.value_nats = best;
  rep.convention = convention;
  rep.spectrum_source = spectrum.source;
  rep.witnesses["theta_star"] = best_theta;
  rep.witnesses["E_term"] = e_term;
  rep.witnesses["m_count"] = static_cast<double>(best_m);
  rep.witnesses["scale"] = scale;
  rep.witnesses["eps_scaled"] = eps_scaled;
  return rep;
}

namespace {

// Sum_i min(lambda_i, level) using a prefix sum over the descending values.
double sum_min(const std::vector<double>& values, const std::vector<double>& prefix,
               double level) {
  auto it = std::lower_bound(values.begin(), values.end(), level,
                             [](double v, double l) { return v > l; });
  const size_t k = static_cast<size_t>(it - values.begin());
  const double trace = prefix.back();
  return static_cast<double>(k) * level + (trace - prefix[k]);
}

}  // namespace

WaterFillSolution water_fill(double distortion, const Spectrum& spectrum) {
  if (!(distortion > 0.0)) throw ParameterError("water_fill: distortion must be positive");
  if (spectrum.values.empty()) throw ParameterError("water_fill: empty spectrum");

  std::vector<double> prefix(spectrum.values.size() + 1, 0.0);
  for (size_t i = 0; i < spectrum.values.size(); ++i)
    prefix[i + 1] = prefix[i] + spectrum.values[i];
  const double trace = prefix.back();
  const double lam1 = spectrum.values.front();

  WaterFillSolution sol;
  if (distortion >= trace) {
    // every channel is fully distorted; the rate is zero at level lambda_1
    sol.water_level = lam1;
    sol.distortion = trace;
    sol.rate_nats = 0.5 * spectral_sum_E(lam1, spectrum);
    return sol;
  }

  double lo = 0.0, hi = lam1;
  while (hi - lo > 1e-12 * lam1) {
    const double mid = 0.5 * (lo + hi);
    if (sum_min(spectrum.values, prefix, mid) < distortion)
      lo = mid;
    else
      hi = mid;
  }
  double level = 0.5 * (lo + hi);
  // snap to the exact piecewise-linear solution within the bracket:
  // sum_min(level) = k*level + tail, with k the count above the bracket
  const long k = count_above_m(hi, spectrum);
  if (k > 0) {
    const double tail = trace - prefix[static_cast<size_t>(k)];
    const double exact = (distortion - tail) / static_cast<double>(k);
    if (exact >= lo && exact <= hi) level = exact;
  }

  sol.water_level = level;
  sol.distortion = sum_min(spectrum.values, prefix, level);
  sol.rate_nats = 0.5 * spectral_sum_E(level, spectrum);
  return sol;
}

EntropyBoundReport lower_bound_simple(double eps, const Spectrum& spectrum,
                                      double total_mass) {
  if (!(eps > 0.0)) throw ParameterError("lower_bound_simple: epsilon must be positive");
  if (!(total_mass > 0.0))
    throw ParameterError("lower_bound_simple: total_mass must be positive");
  const double delta = eps * eps * total_mass / 2.0;
  const long count = count_above_m(delta, spectrum);

  EntropyBoundReport rep;
  rep.epsilon = eps;
  rep.effective_radius = eps;
  rep.value_nats = std::log(static_cast<double>(std::max(count, 1L)));
  rep.convention = "sup_norm";
  rep.spectrum_source = spectrum.source;
  rep.witnesses["delta"] = delta;
  rep.witnesses["count"] = static_cast<double>(count);
  rep.witnesses["total_mass"] = total_mass;
  return rep;
}

EntropyBoundReport lower_bound_main(double eps, const Spectrum& spectrum,
                                    double total_mass, double c_universal,
                                    int delta_grid_count) {
  if (!(eps > 0.0)) throw ParameterError("lower_bound_main: epsilon must be positive");
  if (!(total_mass > 0.0))
    throw ParameterError("lower_bound_main: total_mass must be positive");
  if (!(c_universal > 0.0))
    throw ParameterError("lower_bound_main: c_universal must be positive");
  if (delta_grid_count < 1)
    throw ParameterError("lower_bound_main: delta_grid_count must be >= 1");

  const double delta_floor = total_mass * eps * eps;
  const double lam1 = spectrum.values.empty() ? 0.0 : spectrum.values.front();

  auto fallback = [&]() {
    EntropyBoundReport rep = lower_bound_simple(eps / 2.0, spectrum, total_mass);
    rep.epsilon = eps;
    rep.effective_radius = eps / 2.0;
    rep.fallback = true;
    rep.witnesses["fallback"] = 1.0;
    rep.witnesses["delta_floor"] = delta_floor;
    rep.witnesses["c_universal"] = c_universal;
    return rep;
  };

  if (!(lam1 > delta_floor)) return fallback();

  // candidate deltas: the eigenvalues themselves plus a geometric grid spanning
  // (delta_floor, lambda_1]; scanned in ascending order, first feasible wins
  std::set<double> cand;
  for (double v : spectrum.values) {
    if (!(v > delta_floor)) break;  // descending: the rest are below the floor
    cand.insert(v);
  }
  const double ratio = lam1 / delta_floor;
  for (int j = 1; j <= delta_grid_count; ++j)
    cand.insert(delta_floor * std::pow(ratio, static_cast<double>(j) / delta_grid_count));

  const double sqrt_floor = std::sqrt(total_mass) * eps;
  for (double delta : cand) {
    if (!(delta > delta_floor)) continue;
    const double denom = std::sqrt(delta) - sqrt_floor;
    if (!(denom > 0.0)) continue;
    const double e_at = spectral_sum_E(delta, spectrum);
    const long n_delta = count_above_m(delta, spectrum);
    const double rhs = lam1 * std::exp(-e_at / (4.0 * c_universal)) / (denom * denom);
    if (static_cast<double>(n_delta) >= rhs) {
      EntropyBoundReport rep;
      rep.epsilon = eps;
      rep.effective_radius = eps / 2.0;
      rep.value_nats = 0.25 * e_at;
      rep.convention = "sup_norm";
      rep.spectrum_source = spectrum.source;
      rep.witnesses["delta_star"] = delta;
      rep.witnesses["N_delta"] = static_cast<double>(n_delta);
      rep.witnesses["E_at_delta_star"] = e_at;
      rep.witnesses["feasibility_rhs"] = rhs;
      rep.witnesses["delta_floor"] = delta_floor;
      rep.witnesses["c_universal"] = c_universal;
      return rep;
    }
  }
  return fallback();
}

EntropyBoundReport lower_bound_minor(double eps, const Spectrum& spectrum,
                                     double total_mass, double c_universal,
                                     int delta_grid_count) {
  if (!(eps > 0.0)) throw ParameterError("lower_bound_minor: epsilon must be positive");
  if (!(total_mass > 0.0))
    throw ParameterError("lower_bound_minor: total_mass must be positive");
  if (!(c_universal > 0.0))
    throw ParameterError("lower_bound_minor: c_universal must be positive");
  if (delta_grid_count < 1)
    throw ParameterError("lower_bound_minor: delta_grid_count must be >= 1");

  const double delta0 = total_mass * eps * eps;
  const size_t len = spectrum.values.size();
  const double lam1 = len ? spectrum.values.front() : 0.0;
  const double sigma1 = std::sqrt(lam1);

  EntropyBoundReport rep;
  rep.epsilon = eps;
  rep.effective_radius = eps / 2.0;
  rep.convention = "sup_norm";
  rep.spectrum_source = spectrum.source;
  rep.witnesses["delta0"] = delta0;
  rep.witnesses["c_universal"] = c_universal;

  if (!(lam1 > delta0)) {
    rep.value_nats = 0.0;
    rep.fallback = true;
    rep.witnesses["no_feasible_tail_split"] = 1.0;
    return rep;
  }

  std::vector<double> prefix(len + 1, 0.0);
  for (size_t i = 0; i < len; ++i) prefix[i + 1] = prefix[i] + spectrum.values[i];

  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  double best_delta = 0.0, best_f = 0.0;
  long best_em = 0;
  const double ratio = lam1 / delta0;
  for (int j = 1; j <= delta_grid_count; ++j) {
    const double delta = delta0 * std::pow(ratio, static_cast<double>(j) / delta_grid_count);
    if (!(delta > delta0)) continue;
    const long n_delta = count_above_m(delta, spectrum);
    const long m_max = static_cast<long>(len) - n_delta;
    if (m_max < 1) continue;
    // f(delta, M) = sqrt(N*delta + g(M)) - sqrt((N+M)*delta0); take the best
    // tail split M, which maximizes the admissible quantizer distortion.
    // Every split is admissible, so the search may be thinned on very long
    // tails without affecting validity: exhaustive through M = 4096, then a
    // geometric sweep, plus the full tail M = m_max.
    double f_max = -std::numeric_limits<double>::infinity();
    long m_at = 0;
    const double head = static_cast<double>(n_delta) * delta;
    auto eval_split = [&](long m) {
      const double g = prefix[static_cast<size_t>(n_delta + m)] -
                       prefix[static_cast<size_t>(n_delta)];
      const double f = std::sqrt(head + g) -
                       std::sqrt(static_cast<double>(n_delta + m) * delta0);
      if (f > f_max) {
        f_max = f;
        m_at = m;
      }
    };
    const long m_dense = std::min<long>(m_max, 4096);
    for (long m = 1; m <= m_dense; ++m) eval_split(m);
    for (long m = m_dense + m_dense / 64; m < m_max; m += m / 64) eval_split(m);
    if (m_max > m_dense) eval_split(m_max);
    if (!(f_max > 0.0)) continue;
    const double val =
        0.5 * spectral_sum_E(delta, spectrum) + 2.0 * c_universal * std::log(f_max / sigma1);
    if (val > best) {
      best = val;
      best_delta = delta;
      best_f = f_max;
      best_em = m_at;
      found = true;
    }
  }

  if (!found) {
    rep.value_nats = 0.0;
    rep.fallback = true;
    rep.witnesses["no_feasible_tail_split"] = 1.0;
    return rep;
  }
  rep.value_nats = std::max(best, 0.0);
  rep.witnesses["delta"] = best_delta;
  rep.witnesses["M"] = static_cast<double>(best_em);
  rep.witnesses["f_max"] = best_f;
  rep.witnesses["sigma1"] = sigma1;
  rep.witnesses["unclamped_value"] = best;
  return rep;
}

double gaussian_u(double x, double sigma) {
  if (x == 0.0) return 0.0;
  return 0.5 * x * std::log(2.0 * x / std::exp(1.0)) - x * std::log(sigma);
}

double gaussian_delta(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("gaussian_delta: sigma must be positive");
  const double r = std::floor(sigma * sigma / 2.0);
  return std::min(gaussian_u(r, sigma), gaussian_u(r + 1.0, sigma));
}

namespace {

double log_binomial(int n, int q) {
  return std::lgamma(n + 1.0) - std::lgamma(q + 1.0) - std::lgamma(n - q + 1.0);
}

}  // namespace

EntropyBoundReport gaussian_entropy_bound(double eps, double sigma, int n,
                                          double c_universal) {
  if (!(eps > 0.0 && eps < 1.0))
    throw ParameterError("gaussian_entropy_bound: epsilon must lie in (0, 1)");
  if (!(sigma > 0.0)) throw ParameterError("gaussian_entropy_bound: sigma must be positive");
  if (n < 1) throw ParameterError("gaussian_entropy_bound: n must be >= 1");
  if (!(c_universal > 0.0))
    throw ParameterError("gaussian_entropy_bound: c_universal must be positive");

  const double d_budget = std::log(1.0 / eps) + n * std::log(8.0);
  const double delta_sigma = gaussian_delta(sigma);
  const double kee_offset = -std::log(sigma * sigma * std::exp(1.0) / 4.0);

  double best_log = 0.0;  // q = 0 contributes exactly 1 (empty product)
  int best_q = 0;
  int skipped = 0;
  for (int q = 1; q <= n; ++q) {
    const double base = d_budget - (n - q) * delta_sigma;
    if (!(base > 0.0)) {
      ++skipped;
      continue;
    }
    const double arg = kee_offset + std::log(base) - std::log(static_cast<double>(q));
    if (!(arg > 1.0)) {
      ++skipped;
      continue;
    }
    const double log_term = log_binomial(n, q) + q * std::log(2.0) + q * std::log(base) -
                            std::lgamma(q + 1.0) - std::log(static_cast<double>(q)) -
                            q * std::log(arg);
    if (log_term > best_log) {
      best_log = log_term;
      best_q = q;
    }
  }
  if (skipped == n)
    throw RegimeError(
        "gaussian_entropy_bound: no admissible volume term at this epsilon; "
        "the bound only applies deeper in the small-epsilon regime");

  const double max_term = std::exp(best_log);
  const double value = c_universal * n * std::pow(2.0, n) * (d_budget - n * delta_sigma) *
                       max_term;

  EntropyBoundReport rep;
  rep.epsilon = eps;
  rep.effective_radius = eps;
  rep.value_nats = value;
  rep.convention = "sup_norm";
  rep.spectrum_source = "gaussian_bound";
  rep.witnesses["q_star"] = static_cast<double>(best_q);
  rep.witnesses["D"] = d_budget;
  rep.witnesses["delta_sigma"] = delta_sigma;
  rep.witnesses["max_term"] = max_term;
  rep.witnesses["n"] = static_cast<double>(n);
  rep.witnesses["sigma"] = sigma;
  rep.witnesses["c_universal"] = c_universal;
  rep.witnesses["skipped_q"] = static_cast<double>(skipped);
  return rep;
}

namespace {

// Exact lattice enumeration: nested descent with per-coordinate break once the
// budget can no longer be met (u is increasing past sigma^2/2, and the
// remaining coordinates can contribute at least delta_sigma each).
double count_lattice(int depth, int n, double acc, double d_budget, double sigma,
                     double delta_sigma, long& visited) {
  if (depth == n) return acc < d_budget ? 1.0 : 0.0;
  double total = 0.0;
  const double turn = sigma * sigma / 2.0;
  for (long i = 0;; ++i) {
    if (++visited > 50'000'000L)
      throw ResourceError("integer_point_count: enumeration box overflow");
    const double ui = gaussian_u(static_cast<double>(i), sigma);
    if (static_cast<double>(i) > turn &&
        acc + ui + (n - depth - 1) * delta_sigma >= d_budget)
      break;
    total += count_lattice(depth + 1, n, acc + ui, d_budget, sigma, delta_sigma, visited);
  }
  return total;
}

}  // namespace

double integer_point_count(double eps, double sigma, int n, CountMode mode) {
  if (!(eps > 0.0)) throw ParameterError("integer_point_count: epsilon must be positive");
  if (!(sigma > 0.0)) throw ParameterError("integer_point_count: sigma must be positive");
  if (n < 1) throw ParameterError("integer_point_count: n must be >= 1");

  const double d_budget = std::log(1.0 / eps) + n * std::log(8.0);
  const double delta_sigma = gaussian_delta(sigma);

  if (mode == CountMode::Exact) {
    if (n > 3 || eps < 1e-12)
      throw ParameterError(
          "integer_point_count: exact enumeration supports n <= 3 and epsilon >= 1e-12");
    long visited = 0;
    return count_lattice(0, n, 0.0, d_budget, sigma, delta_sigma, visited);
  }

  // volume route: per-term application of the simplex volume bound
  double total = d_budget - n * delta_sigma > 0.0 ? std::pow(2.0, n) : 0.0;
  for (int q = 1; q <= n; ++q) {
    const double base = d_budget - (n - q) * delta_sigma;
    if (!(base > 0.0))
      throw RegimeError("integer_point_count: volume term has non-positive budget");
    const double arg = -std::log(sigma * sigma * std::exp(1.0) / 4.0) + std::log(base) -
                       std::log(static_cast<double>(q));
    if (!(arg > 1.0))
      throw RegimeError(
          "integer_point_count: volume term outside its validity range; "
          "use a smaller epsilon");
    const double log_vol = q * std::log(4.0) + q * std::log(base) - q * std::log(arg) -
                           std::lgamma(q + 1.0) - std::log(static_cast<double>(q));
    total += std::exp(log_binomial(n, n - q) + (n - q) * std::log(2.0) + log_vol);
  }
  return total;
}

double decay_slope_check(double gamma, double c) {
  if (!(gamma > 0.0)) throw ParameterError("decay_slope_check: gamma must be positive");
  if (!(c > 0.0)) throw ParameterError("decay_slope_check: c must be positive");

  const Spectrum spec = power_law_spectrum(c, gamma, 1'000'000);
  const double cap_const = std::log(2.0) + std::sqrt(2.0);
  std::vector<double> xs, ys;
  for (long n_pts : {100L, 1'000L, 10'000L, 100'000L}) {
    const double eps_n = c / std::pow(static_cast<double>(n_pts), gamma);
    const double e_val = spectral_sum_E(eps_n, spec);
    if (e_val > static_cast<double>(n_pts) * gamma * cap_const)
      throw CheckFailure("decay_slope_check: spectral sum exceeds its analytic cap");
    xs.push_back(std::log(1.0 / eps_n));
    ys.push_back(std::log(e_val));
  }
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace kentropy
