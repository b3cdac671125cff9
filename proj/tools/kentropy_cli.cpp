// Command-line front end: parse a JSON config, dispatch one computation,
// write CSV/JSON results.  Exit codes: 0 ok, 1 check failure, 2 config
// error, 3 resource/numeric error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "CLI11.hpp"
#include "kentropy/bounds.hpp"
#include "kentropy/config.hpp"
#include "kentropy/errors.hpp"
#include "kentropy/kernel.hpp"
#include "kentropy/spectrum.hpp"
#include "kentropy/validate.hpp"

namespace {

using kentropy::Json;

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_given = false;
  double epsilon = 0.0;
  bool epsilon_given = false;
  int threads = 1;  // accepted for interface stability; computations are
                    // single-threaded and deterministic regardless
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw kentropy::ConfigError("cannot write output file: " + path.string());
  out << content;
}

std::filesystem::path prepare_out_dir(const CommonArgs& args) {
  std::filesystem::path dir(args.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw kentropy::ConfigError("cannot create output directory: " + args.out_dir);
  return dir;
}

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

Eigen::MatrixXd random_points(const kentropy::Domain& domain, long m,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int dim = domain.dim();
  Eigen::MatrixXd pts(m, dim);
  for (long i = 0; i < m; ++i) {
    for (int d = 0; d < dim; ++d) {
      const double lo = domain.box(d, 0), hi = domain.box(d, 1);
      pts(i, d) = lo + (hi - lo) * uniform01(rng);
    }
  }
  return pts;
}

std::vector<double> epsilon_grid_from(const Json& block, const std::string& path,
                                      const CommonArgs& args) {
  if (args.epsilon_given) {
    if (!(args.epsilon > 0.0)) {
      throw kentropy::ConfigError("--epsilon must be positive");
    }
    return {args.epsilon};
  }
  const Json& grid = kentropy::require_field(block, "epsilon_grid", path);
  if (!grid.is_array() || grid.empty()) {
    throw kentropy::ConfigError("config field " + path +
                                ".epsilon_grid must be a non-empty array");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid[i].is_number()) {
      throw kentropy::ConfigError(path + ".epsilon_grid[" + std::to_string(i) +
                                  "] must be a number");
    }
    const double e = grid[i].get<double>();
    if (!(e > 0.0)) {
      throw kentropy::ConfigError(path + ".epsilon_grid values must be positive");
    }
    if (!out.empty() && e <= out.back()) {
      throw kentropy::ConfigError(path +
                                  ".epsilon_grid must be strictly ascending");
    }
    out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// spectrum

int cmd_spectrum(const Json& config, const CommonArgs& args) {
  kentropy::ProblemSetup setup;
  const kentropy::ProblemSetup* setup_ptr = nullptr;
  if (kentropy::has_problem_setup(config)) {
    setup = kentropy::setup_from_json(config);
    setup_ptr = &setup;
  }
  Json sidecar;
  const kentropy::Spectrum spectrum =
      kentropy::spectrum_from_json(config, setup_ptr, &sidecar);

  const std::filesystem::path dir = prepare_out_dir(args);
  std::ostringstream csv;
  kentropy::write_spectrum_csv(csv, spectrum);
  write_text_file(dir / "spectrum.csv", csv.str());
  write_text_file(dir / "spectrum.json", sidecar.dump(2) + "\n");
  std::cout << "wrote " << (dir / "spectrum.csv").string() << " ("
            << spectrum.size() << " rows)\n";
  std::cout << "wrote " << (dir / "spectrum.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// bounds

int cmd_bounds(const Json& config, const CommonArgs& args) {
  kentropy::ProblemSetup setup;
  const kentropy::ProblemSetup* setup_ptr = nullptr;
  if (kentropy::has_problem_setup(config)) {
    setup = kentropy::setup_from_json(config);
    setup_ptr = &setup;
  }
  const kentropy::Spectrum spectrum =
      kentropy::spectrum_from_json(config, setup_ptr, nullptr);
  if (spectrum.values.empty() || !(spectrum.values.front() > 0.0)) {
    throw kentropy::ConfigError("bounds need a spectrum with lambda_1 > 0");
  }

  Json block = Json::object();
  if (config.find("bounds") != config.end()) {
    block = config.at("bounds");
    if (!block.is_object())
      throw kentropy::ConfigError("config field bounds must be an object");
  }
  const std::vector<double> eps_grid = epsilon_grid_from(block, "bounds", args);

  double total_mass;
  if (block.find("total_mass") != block.end()) {
    total_mass = kentropy::require_number(block, "total_mass", "bounds");
  } else if (setup_ptr != nullptr) {
    total_mass = setup.measure.total_mass(setup.domain);
  } else {
    total_mass = 1.0;
  }
  if (!(total_mass > 0.0))
    throw kentropy::ConfigError("bounds.total_mass must be positive");

  const std::string convention =
      kentropy::string_or(block, "convention", "sup_norm", "bounds");
  double scale;
  if (block.find("scale") != block.end()) {
    scale = kentropy::require_number(block, "scale", "bounds");
  } else if (convention == "l2") {
    scale = std::sqrt(spectrum.values.front());
  } else if (convention == "sup_norm") {
    // with a kernel in hand the sup-norm constant is sup_x sqrt(K(x,x));
    // synthetic spectra use the trace surrogate sqrt(trace / mass)
    scale = setup_ptr != nullptr
                ? kentropy::sup_diag(setup.kernel, setup.domain, setup.grid)
                : std::sqrt(spectrum.trace() / total_mass);
  } else {
    throw kentropy::ConfigError(
        "bounds.convention must be \"sup_norm\" or \"l2\", got \"" + convention +
        "\"");
  }
  if (!(scale > 0.0)) throw kentropy::ConfigError("bounds.scale must be positive");

  std::vector<double> theta_grid = kentropy::default_theta_grid();
  if (block.find("theta_grid") != block.end()) {
    const Json& tg = block.at("theta_grid");
    if (!tg.is_array() || tg.empty())
      throw kentropy::ConfigError("bounds.theta_grid must be a non-empty array");
    theta_grid.clear();
    for (const Json& t : tg) {
      if (!t.is_number())
        throw kentropy::ConfigError("bounds.theta_grid entries must be numbers");
      theta_grid.push_back(t.get<double>());
    }
  }
  const double c_universal =
      kentropy::number_or(block, "c_universal", 1.0, "bounds");
  const long delta_grid_count =
      kentropy::integer_or(block, "delta_grid_count", 512, "bounds");

  std::ostringstream csv;
  csv << "#kernel-entropy v1\n";
  csv << "#lower_simple holds at radius epsilon; lower_main and lower_minor hold "
         "at effective radius epsilon/2 (checked against the upper bound at "
         "epsilon/2 before emit)\n";
  csv << "#rate_distortion_at_matched_D is the water-filling rate at distortion "
         "D = total_mass * epsilon^2\n";
  csv << "#fallback: 0 none, +1 lower_main fell back to the separated-points "
         "bound, +2 lower_minor had no feasible tail split\n";
  csv << "epsilon,upper_nats,lower_simple,lower_main,lower_minor,"
         "rate_distortion_at_matched_D,theta_star,delta_star,fallback\n";

  const double tol = 1e-9;
  for (double eps : eps_grid) {
    const kentropy::EntropyBoundReport ub = kentropy::upper_bound_main(
        eps, spectrum, scale, theta_grid, convention);
    const kentropy::EntropyBoundReport ub_half = kentropy::upper_bound_main(
        eps / 2.0, spectrum, scale, theta_grid, convention);
    const kentropy::EntropyBoundReport ls =
        kentropy::lower_bound_simple(eps, spectrum, total_mass);
    const kentropy::EntropyBoundReport lm = kentropy::lower_bound_main(
        eps, spectrum, total_mass, c_universal, static_cast<int>(delta_grid_count));
    const kentropy::EntropyBoundReport lmin = kentropy::lower_bound_minor(
        eps, spectrum, total_mass, c_universal, static_cast<int>(delta_grid_count));
    const kentropy::WaterFillSolution wf =
        kentropy::water_fill(total_mass * eps * eps, spectrum);

    // the CSV is self-checking: re-derive the upper bound from its own
    // witnesses and re-verify the ordering chain before the row is written
    const double theta_star = ub.witnesses.at("theta_star");
    const double eps_scaled = ub.witnesses.at("eps_scaled");
    const double rebuilt =
        kentropy::spectral_sum_E(eps_scaled, spectrum) +
        static_cast<double>(kentropy::count_above_m((1.0 - theta_star) * eps_scaled,
                                                    spectrum)) *
            std::log(3.0 / theta_star);
    if (std::abs(rebuilt - ub.value_nats) > tol * std::max(1.0, ub.value_nats)) {
      throw kentropy::CheckFailure(
          "bounds row failed witness reconstruction at epsilon=" + fmt17(eps));
    }
    if (ls.value_nats > ub.value_nats + tol ||
        lm.value_nats > ub_half.value_nats + tol ||
        lmin.value_nats > ub_half.value_nats + tol) {
      throw kentropy::CheckFailure(
          "bounds row violates the lower<=upper ordering at epsilon=" + fmt17(eps));
    }

    int fallback_flags = 0;
    if (lm.fallback) fallback_flags += 1;
    if (lmin.fallback) fallback_flags += 2;
    const double delta_star =
        lm.fallback ? 0.0 : lm.witnesses.at("delta_star");

    csv << fmt17(eps) << ',' << fmt17(ub.value_nats) << ',' << fmt17(ls.value_nats)
        << ',' << fmt17(lm.value_nats) << ',' << fmt17(lmin.value_nats) << ','
        << fmt17(wf.rate_nats) << ',' << fmt17(theta_star) << ','
        << fmt17(delta_star) << ',' << fallback_flags << '\n';
  }

  const std::filesystem::path dir = prepare_out_dir(args);
  write_text_file(dir / "bounds.csv", csv.str());
  std::cout << "wrote " << (dir / "bounds.csv").string() << " (" << eps_grid.size()
            << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// rademacher

int cmd_rademacher(const Json& config, const CommonArgs& args) {
  if (!kentropy::has_problem_setup(config)) {
    throw kentropy::ConfigError("rademacher needs the kernel/domain config block");
  }
  const kentropy::ProblemSetup setup = kentropy::setup_from_json(config);

  const Json& block = kentropy::require_field(config, "rademacher", "config");
  if (!block.is_object())
    throw kentropy::ConfigError("config field rademacher must be an object");

  std::uint64_t seed =
      static_cast<std::uint64_t>(kentropy::integer_or(block, "seed", 0, "rademacher"));
  if (args.seed_given) seed = args.seed;
  const long trials = kentropy::integer_or(block, "trials", 10000, "rademacher");
  if (trials < 1) throw kentropy::ConfigError("rademacher.trials must be >= 1");

  Eigen::MatrixXd points;
  if (block.find("points") != block.end()) {
    const Json& rows = block.at("points");
    if (!rows.is_array() || rows.empty())
      throw kentropy::ConfigError("rademacher.points must be a non-empty array");
    points.resize(static_cast<long>(rows.size()), setup.domain.dim());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Json& row = rows[i];
      if (!row.is_array() ||
          static_cast<int>(row.size()) != setup.domain.dim()) {
        throw kentropy::ConfigError("rademacher.points[" + std::to_string(i) +
                                    "] must match the domain dimension");
      }
      for (std::size_t d = 0; d < row.size(); ++d) {
        if (!row[d].is_number())
          throw kentropy::ConfigError("rademacher.points entries must be numbers");
        points(static_cast<long>(i), static_cast<long>(d)) = row[d].get<double>();
      }
    }
  } else {
    const long count = kentropy::integer_or(block, "count", 50, "rademacher");
    if (count < 1) throw kentropy::ConfigError("rademacher.count must be >= 1");
    points = random_points(setup.domain, count, seed);
  }

  const kentropy::GramSpectrum gram =
      kentropy::gram_spectrum(setup.kernel, setup.domain, points);
  const double bound = kentropy::rademacher_bound(gram);
  const kentropy::McEstimate mc =
      kentropy::rademacher_mc(setup.kernel, setup.domain, points, trials, seed + 1);

  const double certified_level = mc.mean + 3.0 * mc.std_error;
  const bool certified = certified_level <= bound;
  double gram_trace = 0.0;
  for (double v : gram.eigenvalues) gram_trace += v;

  Json report = Json::object();
  report["m"] = points.rows();
  report["dim"] = points.cols();
  report["trials"] = mc.trials;
  report["seed"] = seed;
  report["bound"] = bound;
  report["mc_mean"] = mc.mean;
  report["mc_std_error"] = mc.std_error;
  report["mc_mean_plus_3se"] = certified_level;
  report["margin"] = bound - certified_level;
  report["certified"] = certified;
  report["c_x"] = gram.c_x;
  report["gram_trace"] = gram_trace;

  const std::filesystem::path dir = prepare_out_dir(args);
  write_text_file(dir / "rademacher.json", report.dump(2) + "\n");
  std::cout << "wrote " << (dir / "rademacher.json").string() << "\n";
  if (!certified) {
    std::cerr << "rademacher certificate violated: mc mean + 3se = "
              << fmt17(certified_level) << " > bound = " << fmt17(bound) << "\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gaussian-asymptotics

int cmd_gaussian_asymptotics(const Json& config, const CommonArgs& args) {
  const Json& block =
      kentropy::require_field(config, "gaussian_asymptotics", "config");
  if (!block.is_object())
    throw kentropy::ConfigError("config field gaussian_asymptotics must be an object");

  const double sigma =
      kentropy::number_or(block, "sigma", 1.0, "gaussian_asymptotics");
  const long n = kentropy::require_integer(block, "n", "gaussian_asymptotics");
  if (n < 1) throw kentropy::ConfigError("gaussian_asymptotics.n must be >= 1");
  const double c_universal =
      kentropy::number_or(block, "c_universal", 1.0, "gaussian_asymptotics");
  const std::vector<double> eps_grid =
      epsilon_grid_from(block, "gaussian_asymptotics", args);

  bool exact_counts = n <= 3;
  if (block.find("exact_counts") != block.end()) {
    const Json& flag = block.at("exact_counts");
    if (!flag.is_boolean())
      throw kentropy::ConfigError("gaussian_asymptotics.exact_counts must be a bool");
    exact_counts = flag.get<bool>();
    if (exact_counts && n > 3)
      throw kentropy::ConfigError(
          "gaussian_asymptotics.exact_counts requires n <= 3");
  }

  std::ostringstream csv;
  csv << "#kernel-entropy v1\n";
  csv << "#rate_ratio = bound / (ln^{n+1}(1/eps) / lnln^n(1/eps)); empty when "
         "eps >= 1/e\n";
  csv << "#exact_count is empty when enumeration is out of range (n > 3 or eps "
         "< 1e-12)\n";
  csv << "epsilon,bound_nats,q_star,rate_ratio,exact_count,volume_count\n";
  for (double eps : eps_grid) {
    const kentropy::EntropyBoundReport rep = kentropy::gaussian_entropy_bound(
        eps, sigma, static_cast<int>(n), c_universal);
    const double l = std::log(1.0 / eps);
    std::string ratio;
    if (l > 1.0) {
      ratio = fmt17(rep.value_nats /
                    (std::pow(l, static_cast<double>(n + 1)) /
                     std::pow(std::log(l), static_cast<double>(n))));
    }
    std::string exact;
    if (exact_counts && eps >= 1e-12) {
      exact = fmt17(kentropy::integer_point_count(eps, sigma, static_cast<int>(n),
                                                  kentropy::CountMode::Exact));
    }
    const double volume = kentropy::integer_point_count(
        eps, sigma, static_cast<int>(n), kentropy::CountMode::VolumeBound);
    csv << fmt17(eps) << ',' << fmt17(rep.value_nats) << ','
        << fmt17(rep.witnesses.at("q_star")) << ',' << ratio << ',' << exact << ','
        << fmt17(volume) << '\n';
  }

  const std::filesystem::path dir = prepare_out_dir(args);
  write_text_file(dir / "gaussian_asymptotics.csv", csv.str());
  std::cout << "wrote " << (dir / "gaussian_asymptotics.csv").string() << " ("
            << eps_grid.size() << " rows)\n";
  return 0;
}

// ---------------------------------------------------------------------------
// validate

struct CheckResult {
  std::string name;
  bool pass = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  std::uint64_t seed = 0;
  Json parameters = Json::object();
};

struct CheckContext {
  std::uint64_t seed = 0;
  long mc_trials = 4000;
  long sample_budget = 20000;
  long kkl_samples = 4000;
};

// Shared 1-D Gaussian test system: sigma=1 on [-1,1], Lebesgue weights.
struct GaussianTestSystem {
  kentropy::KernelSpec kernel;
  kentropy::Domain domain;
  kentropy::Grid grid;
  kentropy::EigenSystem system;
};

GaussianTestSystem make_gaussian_system(int nodes, int k_max) {
  GaussianTestSystem t;
  t.kernel = kentropy::GaussianKernel{1.0};
  t.domain.box.resize(1, 2);
  t.domain.box << -1.0, 1.0;
  kentropy::Measure measure;
  measure.kind = kentropy::MeasureKind::UniformLebesgue;
  t.grid = kentropy::build_grid(t.domain, measure, nodes);
  t.system = kentropy::nystrom_spectrum(t.kernel, t.domain, t.grid, k_max);
  return t;
}

std::vector<CheckResult> suite_rademacher(const CheckContext& ctx) {
  std::vector<CheckResult> out;
  kentropy::GaussianKernel kernel{1.0};
  kentropy::Domain domain;
  domain.box.resize(2, 2);
  domain.box << -1.0, 1.0, -1.0, 1.0;

  {
    CheckResult r;
    r.name = "rademacher_certificate_m50";
    r.seed = ctx.seed + 11;
    const Eigen::MatrixXd pts = random_points(domain, 50, r.seed);
    const kentropy::GramSpectrum gram = kentropy::gram_spectrum(kernel, domain, pts);
    const kentropy::McEstimate mc =
        kentropy::rademacher_mc(kernel, domain, pts, ctx.mc_trials, r.seed + 1);
    r.lhs = mc.mean + 3.0 * mc.std_error;
    r.rhs = kentropy::rademacher_bound(gram);
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"m", 50}, {"sigma", 1.0}, {"trials", ctx.mc_trials}};
    out.push_back(r);
  }
  {
    // one point: the Monte-Carlo supremum is exactly sqrt(K(x,x)) = 1 on
    // every draw and the closed form collapses to 6 sqrt(ln 2 + 2)
    CheckResult r;
    r.name = "rademacher_scalar_exact";
    r.seed = ctx.seed + 12;
    Eigen::MatrixXd pts(1, 2);
    pts << 0.25, -0.5;
    const kentropy::GramSpectrum gram = kentropy::gram_spectrum(kernel, domain, pts);
    const kentropy::McEstimate mc =
        kentropy::rademacher_mc(kernel, domain, pts, 100, r.seed);
    const double closed_form = 6.0 * std::sqrt(std::log(2.0) + 2.0);
    r.lhs = std::abs(kentropy::rademacher_bound(gram) - closed_form) +
            std::abs(mc.mean - 1.0) + std::abs(mc.std_error);
    r.rhs = 1e-12;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"closed_form", closed_form}, {"mc_mean", mc.mean}};
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "gram_trace_identity";
    r.seed = ctx.seed + 13;
    kentropy::GaussianKernel narrow{0.5};
    const Eigen::MatrixXd pts = random_points(domain, 30, r.seed);
    const kentropy::GramSpectrum gram = kentropy::gram_spectrum(narrow, domain, pts);
    double sum = 0.0;
    for (double v : gram.eigenvalues) sum += v;
    // Gaussian kernels have K(x,x) = 1, so (1/m) sum_i K(x_i,x_i) = 1
    r.lhs = std::abs(sum - 1.0);
    r.rhs = 1e-10;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"m", 30}, {"sigma", 0.5}, {"eigen_sum", sum}};
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> suite_covering(const CheckContext& ctx) {
  std::vector<CheckResult> out;

  kentropy::EllipsoidInstance inst2;
  inst2.semi_axes = kentropy::gaussian_bound_spectrum(1.0, 2).values;
  inst2.validate();
  const double eps2 = 0.4;
  const long pack2 =
      kentropy::greedy_pack(inst2, eps2, ctx.sample_budget, ctx.seed + 21);
  const long cover2 =
      kentropy::greedy_cover(inst2, eps2, ctx.sample_budget, ctx.seed + 21);

  {
    CheckResult r;
    r.name = "dpp_vs_pack_n2";
    r.seed = ctx.seed + 21;
    kentropy::Spectrum scaled;
    scaled.source = "ellipsoid";
    for (double a : inst2.semi_axes) scaled.values.push_back(a / eps2);
    double best = std::numeric_limits<double>::infinity();
    for (double theta : kentropy::default_theta_grid()) {
      best = std::min(best, kentropy::dpp_ellipsoid_bound(scaled, theta));
    }
    r.lhs = std::log(static_cast<double>(std::max(pack2, 1L)));
    r.rhs = best;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"eps", eps2},
                    {"budget", ctx.sample_budget},
                    {"pack_count", pack2}};
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "pack_le_cover_n2";
    r.seed = ctx.seed + 21;
    r.lhs = static_cast<double>(pack2);
    r.rhs = static_cast<double>(cover2);
    r.margin = r.rhs - r.lhs;
    r.pass = pack2 <= cover2;
    r.parameters = {{"eps", eps2}, {"budget", ctx.sample_budget}};
    out.push_back(r);
  }
  {
    // segment [-4, 4] at eps = 0.5: maximal >1-separated subsets hold
    // between 3 and 9 points, greedy covering between 8 and 17 centers
    CheckResult r;
    r.name = "cover_interval_1d";
    r.seed = ctx.seed + 22;
    kentropy::EllipsoidInstance seg;
    seg.semi_axes = {4.0};
    const double eps = 0.5;
    const long cover = kentropy::greedy_cover(seg, eps, ctx.sample_budget, r.seed);
    const long pack = kentropy::greedy_pack(seg, eps, ctx.sample_budget, r.seed);
    r.lhs = static_cast<double>(cover);
    r.rhs = 17.0;
    r.margin = std::min(r.rhs - r.lhs, r.lhs - 8.0);
    r.pass = cover >= 8 && cover <= 17 && pack <= cover;
    r.parameters = {{"eps", eps}, {"pack_count", pack}, {"cover_lower_window", 8}};
    out.push_back(r);
  }
  {
    // centers of a greedy epsilon-cover are epsilon-separated, so their count
    // is at most the external covering number at epsilon/2, which the
    // spectral upper bound dominates
    CheckResult r;
    r.name = "function_cover_probe_vs_bound";
    r.seed = ctx.seed + 23;
    const GaussianTestSystem t = make_gaussian_system(60, 30);
    const double eps = 0.3;
    const long budget = std::min<long>(ctx.sample_budget, 3000);
    const long count =
        kentropy::function_cover_probe(t.system, 3, eps, budget, r.seed);
    const kentropy::EntropyBoundReport ub = kentropy::upper_bound_main(
        eps / 2.0, t.system.spectrum,
        kentropy::sup_diag(t.kernel, t.domain, t.grid),
        kentropy::default_theta_grid());
    r.lhs = std::log(static_cast<double>(std::max(count, 1L)));
    r.rhs = ub.value_nats;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"n_keep", 3}, {"eps", eps}, {"budget", budget},
                    {"cover_count", count}};
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> suite_kkl(const CheckContext& ctx) {
  std::vector<CheckResult> out;
  const GaussianTestSystem t = make_gaussian_system(60, 30);

  {
    // project one draw back onto the eigenfunctions: the quadrature inner
    // products must return sqrt(lambda_j) xi_j, and the squared coefficient
    // norm is the RKHS norm of the draw
    CheckResult r;
    r.name = "kkl_norm_identity";
    r.seed = ctx.seed + 31;
    const kentropy::GrfSample draw = kentropy::kkl_sample(t.system, 10, r.seed);
    double worst = 0.0;
    for (int j = 0; j < 10; ++j) {
      double proj = 0.0;
      for (long i = 0; i < t.grid.size(); ++i) {
        proj += t.grid.weights[i] * t.system.eigvecs(i, j) * draw.field_values[i];
      }
      const double expect =
          std::sqrt(t.system.spectrum.values[static_cast<std::size_t>(j)]) *
          draw.coefficients[j];
      worst = std::max(worst, std::abs(proj - expect));
    }
    worst = std::max(worst, std::abs(draw.rkhs_norm_sq() -
                                     draw.coefficients.squaredNorm()));
    r.lhs = worst;
    r.rhs = 1e-8;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"n_modes", 10}};
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "kkl_covariance_mc";
    r.seed = ctx.seed + 32;
    const int n_modes = 30;
    const long trials = ctx.kkl_samples;
    std::mt19937_64 rng(r.seed);
    const long m = t.grid.size();
    std::vector<std::pair<long, long>> pairs;
    for (int p = 0; p < 5; ++p) {
      pairs.emplace_back(static_cast<long>(uniform01(rng) * m),
                         static_cast<long>(uniform01(rng) * m));
    }
    std::vector<double> sum(pairs.size(), 0.0), sum_sq(pairs.size(), 0.0);
    for (long trial = 0; trial < trials; ++trial) {
      const kentropy::GrfSample draw =
          kentropy::kkl_sample(t.system, n_modes, r.seed + 1000 + trial);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double v = draw.field_values[pairs[p].first] *
                         draw.field_values[pairs[p].second];
        sum[p] += v;
        sum_sq[p] += v * v;
      }
    }
    double worst_z = 0.0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double mean = sum[p] / trials;
      const double var =
          std::max(0.0, (sum_sq[p] - trials * mean * mean) / (trials - 1));
      const double se = std::sqrt(var / trials);
      double truth = 0.0;
      for (int j = 0; j < n_modes; ++j) {
        truth += t.system.spectrum.values[static_cast<std::size_t>(j)] *
                 t.system.eigvecs(pairs[p].first, j) *
                 t.system.eigvecs(pairs[p].second, j);
      }
      worst_z = std::max(worst_z, std::abs(mean - truth) / std::max(se, 1e-300));
    }
    r.lhs = worst_z;
    r.rhs = 5.0;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"samples", trials}, {"pairs", 5}, {"n_modes", n_modes}};
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> suite_quantizer(const CheckContext& ctx) {
  std::vector<CheckResult> out;

  {
    CheckResult r;
    r.name = "chi_entropy_slope_n10";
    r.seed = ctx.seed;
    std::vector<double> xs, ys;
    for (int k = 2; k <= 10; ++k) {
      const double step = std::pow(2.0, -k);
      xs.push_back(std::log(1.0 / step));
      ys.push_back(kentropy::chi_quantizer_entropy(10, step));
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxy += (xs[i] - mx) * (ys[i] - my);
      sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    const double slope = sxy / sxx;
    r.lhs = slope;
    r.rhs = 1.1;
    r.margin = std::min(1.1 - slope, slope - 0.9);
    r.pass = slope >= 0.9 && slope <= 1.1;
    r.parameters = {{"n_dof", 10}, {"steps", "2^-2..2^-10"}};
    out.push_back(r);
  }
  {
    // independent re-integration of the N=1 cell masses with a flat
    // composite midpoint rule
    CheckResult r;
    r.name = "chi_entropy_vs_bruteforce_n1";
    r.seed = ctx.seed;
    const double step = 0.5;
    const double adaptive = kentropy::chi_quantizer_entropy(1, step);
    double brute = 0.0;
    const double root_2_over_pi = std::sqrt(2.0 / M_PI);
    for (int cell = 0; cell * step < 40.0; ++cell) {
      const int n_mid = 2000;
      double mass = 0.0;
      for (int i = 0; i < n_mid; ++i) {
        const double x = cell * step + (i + 0.5) * step / n_mid;
        mass += root_2_over_pi * std::exp(-0.5 * x * x);
      }
      mass *= step / n_mid;
      if (mass > 0.0) brute -= mass * std::log(mass);
    }
    r.lhs = std::abs(adaptive - brute);
    r.rhs = 1e-6;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"step", step}, {"adaptive", adaptive}, {"brute_force", brute}};
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "universal_c_stability";
    r.seed = ctx.seed;
    const std::vector<int> ns = {1, 10, 100};
    std::vector<double> grid_a, grid_b;
    for (int k = 3; k <= 8; ++k) grid_a.push_back(std::pow(2.0, -k));
    for (int k = 4; k <= 10; ++k) grid_b.push_back(std::pow(2.0, -k));
    const double ca = kentropy::estimate_universal_c(ns, grid_a);
    const double cb = kentropy::estimate_universal_c(ns, grid_b);
    r.lhs = std::abs(ca - cb) / std::max(ca, cb);
    r.rhs = 0.10;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"c_grid_a", ca}, {"c_grid_b", cb}};
    out.push_back(r);
  }
  return out;
}

std::vector<CheckResult> suite_bounds(const CheckContext& ctx) {
  std::vector<CheckResult> out;

  {
    CheckResult r;
    r.name = "waterfill_convexity";
    r.seed = ctx.seed;
    const kentropy::Spectrum spec = kentropy::gaussian_bound_spectrum(1.0, 40);
    const double trace = spec.trace();
    const int n_grid = 20;
    std::vector<double> rates(n_grid);
    for (int i = 0; i < n_grid; ++i) {
      const double d = trace / 50.0 + (trace * 0.9 - trace / 50.0) * i / (n_grid - 1);
      rates[static_cast<std::size_t>(i)] = kentropy::water_fill(d, spec).rate_nats;
    }
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < n_grid; ++i) {
      worst = std::min(worst, rates[i - 1] + rates[i + 1] - 2.0 * rates[i]);
    }
    r.lhs = worst;
    r.rhs = -1e-9;
    r.margin = r.lhs - r.rhs;
    r.pass = r.lhs >= r.rhs;
    r.parameters = {{"grid_points", n_grid}};
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "ordering_chain_gaussian";
    r.seed = ctx.seed;
    const GaussianTestSystem t = make_gaussian_system(100, 40);
    const double mass = 2.0;
    const double scale = kentropy::sup_diag(t.kernel, t.domain, t.grid);
    const std::vector<double> thetas = kentropy::default_theta_grid();
    double worst_excess = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 8; ++i) {
      const double eps =
          1e-3 * std::pow(0.3 / 1e-3, static_cast<double>(i) / 7.0);
      const double ub =
          kentropy::upper_bound_main(eps, t.system.spectrum, scale, thetas).value_nats;
      const double ub_half =
          kentropy::upper_bound_main(eps / 2.0, t.system.spectrum, scale, thetas)
              .value_nats;
      const double ls =
          kentropy::lower_bound_simple(eps, t.system.spectrum, mass).value_nats;
      const double lm =
          kentropy::lower_bound_main(eps, t.system.spectrum, mass).value_nats;
      const double lmin =
          kentropy::lower_bound_minor(eps, t.system.spectrum, mass).value_nats;
      worst_excess = std::max({worst_excess, ls - ub, lm - ub_half, lmin - ub_half});
    }
    r.lhs = worst_excess;
    r.rhs = 1e-9;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"eps_grid", "8 log-spaced in [1e-3, 0.3]"}, {"mass", mass}};
    out.push_back(r);
  }
  {
    CheckResult r;
    r.name = "witness_reconstruction";
    r.seed = ctx.seed;
    const kentropy::Spectrum spec = kentropy::gaussian_bound_spectrum(1.0, 200);
    const double mass = 2.0;
    const double scale = std::sqrt(spec.trace() / mass);
    double worst = 0.0;

    const kentropy::EntropyBoundReport ub = kentropy::upper_bound_main(
        0.05, spec, scale, kentropy::default_theta_grid());
    const double theta = ub.witnesses.at("theta_star");
    const double eps_scaled = ub.witnesses.at("eps_scaled");
    const double rebuilt =
        kentropy::spectral_sum_E(eps_scaled, spec) +
        static_cast<double>(
            kentropy::count_above_m((1.0 - theta) * eps_scaled, spec)) *
            std::log(3.0 / theta);
    worst = std::max(worst, std::abs(rebuilt - ub.value_nats));

    const kentropy::EntropyBoundReport lm =
        kentropy::lower_bound_main(0.05, spec, mass);
    if (!lm.fallback) {
      const double delta_star = lm.witnesses.at("delta_star");
      const double e_at = kentropy::spectral_sum_E(delta_star, spec);
      worst = std::max(worst, std::abs(e_at - lm.witnesses.at("E_at_delta_star")));
      worst = std::max(worst, std::abs(0.25 * e_at - lm.value_nats));
      const double n_delta =
          static_cast<double>(kentropy::count_above_m(delta_star, spec));
      worst = std::max(worst, std::abs(n_delta - lm.witnesses.at("N_delta")));
      if (n_delta < lm.witnesses.at("feasibility_rhs")) {
        worst = std::max(worst, 1.0);  // claimed-feasible delta is not feasible
      }
    } else {
      worst = std::max(worst, 1.0);  // this instance is known to be feasible
    }

    const kentropy::EntropyBoundReport lmin =
        kentropy::lower_bound_minor(0.05, spec, mass);
    if (!lmin.fallback) {
      const double delta = lmin.witnesses.at("delta");
      const long n_delta = kentropy::count_above_m(delta, spec);
      const long m_split = static_cast<long>(lmin.witnesses.at("M"));
      double tail = 0.0;
      for (long j = n_delta; j < n_delta + m_split; ++j) {
        tail += spec.values[static_cast<std::size_t>(j)];
      }
      const double f =
          std::sqrt(static_cast<double>(n_delta) * delta + tail) -
          std::sqrt(static_cast<double>(n_delta + m_split) *
                    lmin.witnesses.at("delta0"));
      worst = std::max(worst, std::abs(f - lmin.witnesses.at("f_max")));
    }

    r.lhs = worst;
    r.rhs = 1e-9;
    r.margin = r.rhs - r.lhs;
    r.pass = r.lhs <= r.rhs;
    r.parameters = {{"epsilon", 0.05}, {"mass", mass}};
    out.push_back(r);
  }
  return out;
}

int cmd_validate(const Json& config, const CommonArgs& args) {
  Json block = Json::object();
  if (config.find("validate") != config.end()) {
    block = config.at("validate");
    if (!block.is_object())
      throw kentropy::ConfigError("config field validate must be an object");
  }

  CheckContext ctx;
  ctx.seed = static_cast<std::uint64_t>(
      kentropy::integer_or(block, "seed", 0, "validate"));
  if (args.seed_given) ctx.seed = args.seed;
  ctx.mc_trials = kentropy::integer_or(block, "mc_trials", 4000, "validate");
  ctx.sample_budget =
      kentropy::integer_or(block, "sample_budget", 20000, "validate");
  ctx.kkl_samples = kentropy::integer_or(block, "kkl_samples", 4000, "validate");
  if (ctx.mc_trials < 2 || ctx.sample_budget < 1 || ctx.kkl_samples < 2) {
    throw kentropy::ConfigError("validate budgets are too small");
  }

  const std::vector<std::string> all_suites = {"rademacher", "covering", "kkl",
                                               "quantizer", "bounds"};
  std::vector<std::string> suites = all_suites;
  if (block.find("suites") != block.end()) {
    const Json& sel = block.at("suites");
    if (sel.is_string() && sel.get<std::string>() == "all") {
      // keep the default
    } else if (sel.is_array() && !sel.empty()) {
      suites.clear();
      for (const Json& s : sel) {
        if (!s.is_string())
          throw kentropy::ConfigError("validate.suites entries must be strings");
        const std::string name = s.get<std::string>();
        if (std::find(all_suites.begin(), all_suites.end(), name) ==
            all_suites.end()) {
          throw kentropy::ConfigError("unknown validate suite: " + name);
        }
        suites.push_back(name);
      }
    } else {
      throw kentropy::ConfigError(
          "validate.suites must be \"all\" or a non-empty array of names");
    }
  }

  std::vector<CheckResult> results;
  for (const std::string& suite : suites) {
    std::vector<CheckResult> part;
    if (suite == "rademacher") part = suite_rademacher(ctx);
    if (suite == "covering") part = suite_covering(ctx);
    if (suite == "kkl") part = suite_kkl(ctx);
    if (suite == "quantizer") part = suite_quantizer(ctx);
    if (suite == "bounds") part = suite_bounds(ctx);
    for (CheckResult& r : part) {
      r.parameters["suite"] = suite;
      results.push_back(std::move(r));
    }
  }

  long failed = 0;
  Json checks = Json::array();
  std::ostringstream csv;
  csv << "#kernel-entropy v1\n";
  csv << "check_name,status,lhs,rhs,margin,seed\n";
  for (const CheckResult& r : results) {
    if (!r.pass) ++failed;
    Json c = Json::object();
    c["check_name"] = r.name;
    c["status"] = r.pass ? "pass" : "fail";
    c["lhs"] = r.lhs;
    c["rhs"] = r.rhs;
    c["margin"] = r.margin;
    c["seed"] = r.seed;
    c["parameters"] = r.parameters;
    checks.push_back(c);
    csv << r.name << ',' << (r.pass ? "pass" : "fail") << ',' << fmt17(r.lhs) << ','
        << fmt17(r.rhs) << ',' << fmt17(r.margin) << ',' << r.seed << '\n';
  }
  Json report = Json::object();
  report["checks"] = checks;
  report["summary"] = {{"total", results.size()}, {"failed", failed}};

  const std::filesystem::path dir = prepare_out_dir(args);
  write_text_file(dir / "validate_report.json", report.dump(2) + "\n");
  write_text_file(dir / "validate_summary.csv", csv.str());
  std::cout << "wrote " << (dir / "validate_report.json").string() << "\n";
  std::cout << "wrote " << (dir / "validate_summary.csv").string() << "\n";
  std::cout << results.size() - failed << "/" << results.size()
            << " checks passed\n";
  if (failed > 0) {
    for (const CheckResult& r : results) {
      if (!r.pass) {
        std::cerr << "check failed: " << r.name << " (lhs=" << fmt17(r.lhs)
                  << ", rhs=" << fmt17(r.rhs) << ")\n";
      }
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectral covering-entropy bounds for kernel unit balls"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&args](CLI::App* cmd) {
    cmd->add_option("--config", args.config_path, "path to the JSON config file")
        ->required();
    cmd->add_option("--out", args.out_dir, "output directory (default: .)");
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--threads", args.threads,
                    "worker thread cap (results do not depend on it)");
    cmd->add_option("--epsilon", args.epsilon,
                    "replace the config epsilon grid with a single value");
  };

  CLI::App* c_spectrum = app.add_subcommand(
      "spectrum", "compute an eigenvalue spectrum and cache it as CSV");
  CLI::App* c_bounds = app.add_subcommand(
      "bounds", "evaluate upper/lower entropy bounds over an epsilon grid");
  CLI::App* c_rademacher = app.add_subcommand(
      "rademacher", "Rademacher complexity certificate vs Monte-Carlo estimate");
  CLI::App* c_gauss = app.add_subcommand(
      "gaussian-asymptotics", "closed-form Gaussian product-kernel entropy bound");
  CLI::App* c_validate =
      app.add_subcommand("validate", "run the oracle cross-check suites");
  for (CLI::App* cmd : {c_spectrum, c_bounds, c_rademacher, c_gauss, c_validate}) {
    add_common(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  CLI::App* parsed = app.get_subcommands().front();
  args.seed_given = parsed->count("--seed") > 0;
  args.epsilon_given = parsed->count("--epsilon") > 0;

  try {
    const Json config = kentropy::load_config_file(args.config_path);
    if (parsed == c_spectrum) return cmd_spectrum(config, args);
    if (parsed == c_bounds) return cmd_bounds(config, args);
    if (parsed == c_rademacher) return cmd_rademacher(config, args);
    if (parsed == c_gauss) return cmd_gaussian_asymptotics(config, args);
    if (parsed == c_validate) return cmd_validate(config, args);
    std::cerr << "error: unknown subcommand\n";
    return 2;
  } catch (const kentropy::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kentropy::ParameterError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kentropy::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const kentropy::CheckFailure& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 1;
  } catch (const kentropy::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return 3;
  } catch (const kentropy::RegimeError& e) {
    std::cerr << "regime error: " << e.what() << "\n";
    return 3;
  } catch (const kentropy::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
