// Acceptance gate: nine pass/fail checks covering the eigenvalue envelope,
// bound ordering, the Rademacher certificate, ellipsoid covering consistency,
// power-law and Gaussian entropy rates, random-field covariance, quantizer
// entropy, and CLI determinism.  Prints one line per check and exits nonzero
// if any fails.  Usage: acceptance --cli PATH --workdir DIR

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "kentropy/bounds.hpp"
#include "kentropy/errors.hpp"
#include "kentropy/kernel.hpp"
#include "kentropy/spectrum.hpp"
#include "kentropy/validate.hpp"

namespace {

namespace fs = std::filesystem;
using namespace kentropy;

std::string g_cli;
fs::path g_workdir;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

Domain interval_domain() {
  Domain d;
  d.box.resize(1, 2);
  d.box << -1.0, 1.0;
  return d;
}

Domain square_domain() {
  Domain d;
  d.box.resize(2, 2);
  d.box << -1.0, 1.0, -1.0, 1.0;
  return d;
}

Grid lebesgue_grid(const Domain& d, int nodes_per_dim) {
  Measure m;
  m.kind = MeasureKind::UniformLebesgue;
  return build_grid(d, m, nodes_per_dim);
}

double least_squares_slope(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(ys.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

// 1: discretized eigenvalues never exceed the closed-form envelope
Outcome check_eigen_envelope() {
  const Domain d = interval_domain();
  const Grid grid = lebesgue_grid(d, 200);
  long trusted = 0;
  for (double sigma : {0.5, 1.0, 2.0}) {
    const EigenSystem sys = nystrom_spectrum(GaussianKernel{sigma}, d, grid, 200);
    const double lam1 = sys.spectrum.values.front();
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * lam1;
    for (std::size_t i = 0; i < sys.spectrum.size(); ++i) {
      const double lam = sys.spectrum.values[i];
      if (lam <= floor) break;
      ++trusted;
      const double envelope = gaussian_eigen_bound(static_cast<int>(i) + 1, sigma);
      if (lam > envelope + 1e-9) {
        return {false, "sigma=" + fmt(sigma) + ": lambda_" + std::to_string(i + 1) +
                           "=" + fmt(lam) + " exceeds envelope " + fmt(envelope)};
      }
    }
  }
  return {true, std::to_string(trusted) + " trusted eigenvalues across 3 bandwidths"};
}

// 2: both lower bounds stay below the upper bound at matched radii
Outcome check_bound_ordering() {
  struct OrderCase {
    std::string name;
    Spectrum spectrum;
    double scale;
    double mass;
    double eps_lo;
    double eps_hi;
  };
  std::vector<OrderCase> cases;
  {
    const Domain d = interval_domain();
    const Grid grid = lebesgue_grid(d, 200);
    const GaussianKernel kernel{1.0};
    EigenSystem sys = nystrom_spectrum(kernel, d, grid, 200);
    cases.push_back({"gaussian sigma=1", std::move(sys.spectrum),
                     sup_diag(kernel, d, grid), 2.0, 1e-4, 0.5});
  }
  for (double gamma : {1.0, 2.0}) {
    Spectrum s = power_law_spectrum(1.0, gamma, 1'000'000);
    const double scale = std::sqrt(s.trace());
    cases.push_back({"power law gamma=" + fmt(gamma), std::move(s), scale, 1.0,
                     0.05, 1.0});
  }
  const std::vector<double> thetas = default_theta_grid();
  long rows = 0;
  for (const OrderCase& c : cases) {
    for (int i = 0; i < 20; ++i) {
      const double eps =
          c.eps_lo * std::pow(c.eps_hi / c.eps_lo, static_cast<double>(i) / 19.0);
      const double ub =
          upper_bound_main(eps, c.spectrum, c.scale, thetas).value_nats;
      const double ub_half =
          upper_bound_main(eps / 2.0, c.spectrum, c.scale, thetas).value_nats;
      const double ls = lower_bound_simple(eps, c.spectrum, c.mass).value_nats;
      const double lm = lower_bound_main(eps, c.spectrum, c.mass).value_nats;
      const double lmin = lower_bound_minor(eps, c.spectrum, c.mass).value_nats;
      if (ls > ub + 1e-9 || lm > ub_half + 1e-9 || lmin > ub_half + 1e-9) {
        return {false, c.name + " at eps=" + fmt(eps) + ": ls=" + fmt(ls) +
                           " lm=" + fmt(lm) + " lminor=" + fmt(lmin) +
                           " vs ub=" + fmt(ub) + " ub_half=" + fmt(ub_half)};
      }
      ++rows;
    }
  }
  return {true, std::to_string(rows) + " (spectrum, epsilon) rows, zero violations"};
}

// 3: Monte-Carlo Rademacher mean + 3 SE never crosses the closed-form bound
Outcome check_rademacher_certificate() {
  const Domain d = square_domain();
  const double sigmas[] = {0.5, 1.0, 2.0};
  const long ms[] = {10, 50, 200};
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 20; ++i) {
    const long m = ms[i % 3];
    const GaussianKernel kernel{sigmas[(i / 3) % 3]};
    std::mt19937_64 rng(4000 + static_cast<std::uint64_t>(i));
    Eigen::MatrixXd pts(m, 2);
    for (long r = 0; r < m; ++r) {
      pts(r, 0) = 2.0 * uniform01(rng) - 1.0;
      pts(r, 1) = 2.0 * uniform01(rng) - 1.0;
    }
    const GramSpectrum gram = gram_spectrum(kernel, d, pts);
    const double bound = rademacher_bound(gram);
    const McEstimate mc =
        rademacher_mc(kernel, d, pts, 10000, 5000 + static_cast<std::uint64_t>(i));
    const double level = mc.mean + 3.0 * mc.std_error;
    if (level > bound) {
      return {false, "set " + std::to_string(i) + " (m=" + std::to_string(m) +
                         ", sigma=" + fmt(kernel.sigma) + "): mc " + fmt(level) +
                         " > bound " + fmt(bound)};
    }
    worst_margin = std::min(worst_margin, bound - level);
  }
  return {true, "20 point sets certified, worst margin " + fmt(worst_margin)};
}

// 4: empirical packing counts respect the ellipsoid covering bound
Outcome check_ellipsoid_consistency() {
  const std::vector<double> thetas = default_theta_grid();
  double worst_margin = std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 4; ++n) {
    EllipsoidInstance inst;
    inst.semi_axes = gaussian_bound_spectrum(1.0, n).values;
    for (double eps : {0.1, 0.2, 0.4}) {
      const std::uint64_t seed = 600 + static_cast<std::uint64_t>(n) * 10 +
                                 static_cast<std::uint64_t>(eps * 10);
      const long pack = greedy_pack(inst, eps, 100000, seed);
      const long cover = greedy_cover(inst, eps, 100000, seed);
      if (pack > cover) {
        return {false, "n=" + std::to_string(n) + " eps=" + fmt(eps) + ": pack " +
                           std::to_string(pack) + " > cover " + std::to_string(cover)};
      }
      Spectrum scaled;
      scaled.source = "ellipsoid";
      for (double a : inst.semi_axes) scaled.values.push_back(a / eps);
      double bound = std::numeric_limits<double>::infinity();
      for (double theta : thetas) {
        bound = std::min(bound, dpp_ellipsoid_bound(scaled, theta));
      }
      const double lhs = std::log(static_cast<double>(std::max(pack, 1L)));
      if (lhs > bound) {
        return {false, "n=" + std::to_string(n) + " eps=" + fmt(eps) + ": ln(pack)=" +
                           fmt(lhs) + " > bound " + fmt(bound)};
      }
      worst_margin = std::min(worst_margin, bound - lhs);
    }
  }
  return {true, "12 (dimension, epsilon) cells, worst margin " + fmt(worst_margin) +
                    " nats"};
}

// 5: power-law spectra have slope 1/gamma and respect the analytic cap
Outcome check_power_law_rate() {
  std::string slopes;
  for (double gamma : {1.0, 2.0, 4.0}) {
    const double slope = decay_slope_check(gamma);  // CheckFailure if cap broken
    const double target = 1.0 / gamma;
    if (std::abs(slope - target) > 0.1 * target) {
      return {false, "gamma=" + fmt(gamma) + ": slope " + fmt(slope) +
                         " is not within 10% of " + fmt(target)};
    }
    slopes += (slopes.empty() ? "" : ", ") + fmt(slope);
  }
  return {true, "slopes " + slopes + " within 10% of 1/gamma, caps hold"};
}

// 6: the closed-form Gaussian bound tracks ln^{n+1}(1/e)/lnln^n(1/e), and the
// exact lattice count never exceeds its volume bound
Outcome check_gaussian_asymptotics() {
  std::string spreads;
  for (int n : {1, 2}) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (double eps : {1e-4, 1e-6, 1e-8, 1e-10, 1e-12}) {
      const double value = gaussian_entropy_bound(eps, 1.0, n).value_nats;
      const double l = std::log(1.0 / eps);
      const double ratio =
          value / (std::pow(l, n + 1.0) / std::pow(std::log(l), static_cast<double>(n)));
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    if (hi / lo >= 3.0) {
      return {false, "n=" + std::to_string(n) + ": ratio spread " + fmt(hi / lo) +
                         " is not < 3"};
    }
    spreads += (spreads.empty() ? "" : ", ") + fmt(hi / lo);
  }
  for (int n : {1, 2, 3}) {
    for (double eps : {0.5, 0.1, 0.01}) {
      const double exact = integer_point_count(eps, 1.0, n, CountMode::Exact);
      const double volume = integer_point_count(eps, 1.0, n, CountMode::VolumeBound);
      if (exact > volume + 1e-9) {
        return {false, "n=" + std::to_string(n) + " eps=" + fmt(eps) + ": exact " +
                           fmt(exact) + " > volume bound " + fmt(volume)};
      }
    }
  }
  return {true, "ratio spreads " + spreads + "; exact counts below volume bounds"};
}

// 7: the sampled random field reproduces the truncated kernel covariance
Outcome check_field_covariance() {
  const Domain d = interval_domain();
  const Grid grid = lebesgue_grid(d, 60);
  const GaussianKernel kernel{1.0};
  const EigenSystem sys = nystrom_spectrum(kernel, d, grid, 30);
  const int n_modes = 30;
  const long trials = 10000;

  std::mt19937_64 rng(909);
  std::vector<std::pair<long, long>> pairs;
  for (int p = 0; p < 10; ++p) {
    pairs.emplace_back(static_cast<long>(uniform01(rng) * grid.size()),
                       static_cast<long>(uniform01(rng) * grid.size()));
  }
  std::vector<double> sum(pairs.size(), 0.0), sum_sq(pairs.size(), 0.0);
  for (long t = 0; t < trials; ++t) {
    const GrfSample draw = kkl_sample(sys, n_modes, 7000 + static_cast<std::uint64_t>(t));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double v =
          draw.field_values[pairs[p].first] * draw.field_values[pairs[p].second];
      sum[p] += v;
      sum_sq[p] += v * v;
    }
  }
  double worst_z = 0.0;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double mean = sum[p] / static_cast<double>(trials);
    const double var = std::max(
        0.0, (sum_sq[p] - static_cast<double>(trials) * mean * mean) /
                 static_cast<double>(trials - 1));
    const double se = std::sqrt(var / static_cast<double>(trials));
    double truth = 0.0;
    for (int j = 0; j < n_modes; ++j) {
      truth += sys.spectrum.values[static_cast<std::size_t>(j)] *
               sys.eigvecs(pairs[p].first, j) * sys.eigvecs(pairs[p].second, j);
    }
    const double z = std::abs(mean - truth) / std::max(se, 1e-300);
    worst_z = std::max(worst_z, z);
    if (z > 5.0) {
      return {false, "pair " + std::to_string(p) + ": |mean - truth| = " +
                         fmt(std::abs(mean - truth)) + " is " + fmt(z) +
                         " standard errors"};
    }
  }
  return {true, "10 node pairs within 5 SE (worst " + fmt(worst_z) + " SE)"};
}

// 8: quantizer entropy grows like ln(1/step), and the empirical universal
// constant is grid-stable
Outcome check_quantizer_rate() {
  std::string slopes;
  for (int n_dof : {1, 10, 100}) {
    std::vector<double> xs, ys;
    for (int k = 2; k <= 10; ++k) {
      const double step = std::pow(2.0, -k);
      xs.push_back(std::log(1.0 / step));
      ys.push_back(chi_quantizer_entropy(n_dof, step));
    }
    const double slope = least_squares_slope(xs, ys);
    if (slope < 0.9 || slope > 1.1) {
      return {false, "n_dof=" + std::to_string(n_dof) + ": slope " + fmt(slope) +
                         " outside [0.9, 1.1]"};
    }
    slopes += (slopes.empty() ? "" : ", ") + fmt(slope);
  }
  const std::vector<int> ns = {1, 10, 100};
  std::vector<double> grid_a, grid_b;
  for (int k = 3; k <= 8; ++k) grid_a.push_back(std::pow(2.0, -k));
  for (int k = 4; k <= 10; ++k) grid_b.push_back(std::pow(2.0, -k));
  const double ca = estimate_universal_c(ns, grid_a);
  const double cb = estimate_universal_c(ns, grid_b);
  const double rel = std::abs(ca - cb) / std::max(ca, cb);
  if (rel > 0.10) {
    return {false, "universal constant drifts " + fmt(100.0 * rel) +
                       "% between step grids (" + fmt(ca) + " vs " + fmt(cb) + ")"};
  }
  return {true, "slopes " + slopes + "; constant stable to " + fmt(100.0 * rel) + "%"};
}

// 9: identical config + seed reproduces byte-identical CLI output
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ResourceError("acceptance: cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& subcommand, const fs::path& config,
            const fs::path& out_dir) {
  const std::string cmd = "\"" + g_cli + "\" " + subcommand + " --config \"" +
                          config.string() + "\" --out \"" + out_dir.string() +
                          "\" > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome check_cli_determinism() {
  struct Run {
    std::string subcommand;
    std::string config_json;
    std::vector<std::string> outputs;
  };
  const std::vector<Run> runs = {
      {"spectrum",
       R"({"spectrum": {"source": "gaussian_bound", "sigma": 1.0, "k_max": 50}})",
       {"spectrum.csv", "spectrum.json"}},
      {"bounds",
       R"({"spectrum": {"source": "power_law", "c": 1.0, "gamma": 2.0, "count": 2000},)"
       R"( "bounds": {"epsilon_grid": [0.05, 0.1, 0.2, 0.4, 0.8], "total_mass": 1.0}})",
       {"bounds.csv"}},
      {"rademacher",
       R"({"kernel": {"type": "gaussian", "sigma": 1.0},)"
       R"( "domain": {"box": [[-1.0, 1.0], [-1.0, 1.0]]},)"
       R"( "measure": "uniform_lebesgue", "nodes_per_dim": 10,)"
       R"( "rademacher": {"count": 12, "trials": 400, "seed": 5}})",
       {"rademacher.json"}}};

  long files_checked = 0;
  for (const Run& run : runs) {
    const fs::path config = g_workdir / (run.subcommand + "_config.json");
    {
      std::ofstream out(config, std::ios::binary);
      out << run.config_json << "\n";
    }
    const fs::path dir_a = g_workdir / (run.subcommand + "_a");
    const fs::path dir_b = g_workdir / (run.subcommand + "_b");
    if (run_cli(run.subcommand, config, dir_a) != 0 ||
        run_cli(run.subcommand, config, dir_b) != 0) {
      return {false, run.subcommand + " invocation failed"};
    }
    for (const std::string& name : run.outputs) {
      if (slurp(dir_a / name) != slurp(dir_b / name)) {
        return {false, run.subcommand + " re-run changed " + name};
      }
      ++files_checked;
    }
  }
  return {true, std::to_string(files_checked) + " output files byte-identical on re-run"};
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--cli") g_cli = argv[++i];
    if (arg == "--workdir") g_workdir = argv[++i];
  }
  if (g_cli.empty() || g_workdir.empty()) {
    std::fprintf(stderr, "usage: acceptance --cli PATH --workdir DIR\n");
    return 2;
  }
  std::error_code ec;
  fs::create_directories(g_workdir, ec);
  if (ec) {
    std::fprintf(stderr, "cannot create workdir %s\n", g_workdir.string().c_str());
    return 2;
  }

  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"eigenvalue envelope dominates the 200-node discretization", 5.0,
       check_eigen_envelope},
      {"lower bounds stay below the upper bound at matched radii", 10.0,
       check_bound_ordering},
      {"Rademacher certificate holds against Monte-Carlo estimates", 30.0,
       check_rademacher_certificate},
      {"greedy ellipsoid packing respects the covering bound", 60.0,
       check_ellipsoid_consistency},
      {"power-law entropy rate matches 1/gamma with analytic caps", 10.0,
       check_power_law_rate},
      {"Gaussian bound tracks its asymptotic rate; exact <= volume", 30.0,
       check_gaussian_asymptotics},
      {"sampled field covariance matches the eigen-expansion", 20.0,
       check_field_covariance},
      {"quantizer entropy slope is 1 and the constant is grid-stable", 20.0,
       check_quantizer_rate},
      {"CLI output is byte-identical under identical config and seed", 5.0,
       check_cli_determinism},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (outcome.pass && elapsed >= criteria[i].budget_s) {
      outcome.pass = false;
      outcome.detail = "runtime " + fmt(elapsed) + " s exceeds the " +
                       fmt(criteria[i].budget_s) + " s budget";
    }
    std::printf("[%s] %zu. %s (%.2f s)%s%s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].name, elapsed, outcome.detail.empty() ? "" : " -- ",
                outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  if (failures > 0) {
    std::printf("%d of %zu acceptance checks failed\n", failures, criteria.size());
    return 1;
  }
  std::printf("all %zu acceptance checks passed\n", criteria.size());
  return 0;
}
