// Python bindings for the covering-entropy core.  Spectra cross the boundary
// as plain lists of descending eigenvalues; bound reports come back as dicts
// mirroring the C++ report struct.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <utility>
#include <vector>

#include "kentropy/bounds.hpp"
#include "kentropy/errors.hpp"
#include "kentropy/kernel.hpp"
#include "kentropy/spectrum.hpp"
#include "kentropy/validate.hpp"

namespace py = pybind11;

namespace {

kentropy::Spectrum make_spectrum(const std::vector<double>& values) {
  kentropy::Spectrum s;
  s.values = values;
  s.source = "python";
  s.validate();
  return s;
}

py::dict report_dict(const kentropy::EntropyBoundReport& rep) {
  py::dict witnesses;
  for (const auto& [key, value] : rep.witnesses) witnesses[py::str(key)] = value;
  py::dict d;
  d["epsilon"] = rep.epsilon;
  d["effective_radius"] = rep.effective_radius;
  d["value_nats"] = rep.value_nats;
  d["value_bits"] = rep.value_bits();
  d["witnesses"] = witnesses;
  d["convention"] = rep.convention;
  d["spectrum_source"] = rep.spectrum_source;
  d["fallback"] = rep.fallback;
  return d;
}

Eigen::MatrixXd points_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty())
    throw kentropy::ParameterError("points must be a non-empty list of rows");
  const long cols = static_cast<long>(rows.front().size());
  if (cols < 1) throw kentropy::ParameterError("points rows must be non-empty");
  Eigen::MatrixXd pts(static_cast<long>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<long>(rows[i].size()) != cols)
      throw kentropy::ParameterError("points rows have unequal lengths");
    for (long j = 0; j < cols; ++j) pts(static_cast<long>(i), j) = rows[i][j];
  }
  return pts;
}

kentropy::Domain box_domain(const std::vector<std::pair<double, double>>& box) {
  kentropy::Domain d;
  d.box.resize(static_cast<long>(box.size()), 2);
  for (std::size_t i = 0; i < box.size(); ++i) {
    d.box(static_cast<long>(i), 0) = box[i].first;
    d.box(static_cast<long>(i), 1) = box[i].second;
  }
  d.validate();
  return d;
}

kentropy::EllipsoidInstance make_instance(const std::vector<double>& semi_axes,
                                          const std::vector<double>& weights) {
  kentropy::EllipsoidInstance inst;
  inst.semi_axes = semi_axes;
  inst.metric_weights = weights;
  inst.validate();
  return inst;
}

}  // namespace

PYBIND11_MODULE(_kentropy, m) {
  m.doc() = "spectral covering-entropy bounds for kernel unit balls";

  py::register_exception<kentropy::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<kentropy::ParameterError>(m, "ParameterError",
                                                   PyExc_ValueError);
  py::register_exception<kentropy::DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<kentropy::RegimeError>(m, "RegimeError", PyExc_ValueError);
  py::register_exception<kentropy::ResourceError>(m, "ResourceError",
                                                  PyExc_RuntimeError);
  py::register_exception<kentropy::NumericError>(m, "NumericError",
                                                 PyExc_ArithmeticError);
  py::register_exception<kentropy::CheckFailure>(m, "CheckFailure",
                                                 PyExc_RuntimeError);

  // spectra -------------------------------------------------------------
  m.def("gaussian_eigen_bound", &kentropy::gaussian_eigen_bound, py::arg("k"),
        py::arg("sigma"),
        "Closed-form eigenvalue envelope of the Gaussian kernel on [-1, 1].");
  m.def(
      "gaussian_bound_spectrum",
      [](double sigma, int k_max) {
        return kentropy::gaussian_bound_spectrum(sigma, k_max).values;
      },
      py::arg("sigma"), py::arg("k_max"),
      "First k_max envelope values, sorted descending.");
  m.def(
      "power_law_spectrum",
      [](double c, double gamma, std::size_t count) {
        return kentropy::power_law_spectrum(c, gamma, count).values;
      },
      py::arg("c"), py::arg("gamma"), py::arg("count"),
      "lambda_i = c / i^gamma for i = 1..count.");
  m.def(
      "gaussian_nystrom_spectrum",
      [](double sigma, int nodes, int k_max, double lo, double hi) {
        kentropy::Domain d = box_domain({{lo, hi}});
        kentropy::Measure measure;
        measure.kind = kentropy::MeasureKind::UniformLebesgue;
        const kentropy::Grid grid = kentropy::build_grid(d, measure, nodes);
        return kentropy::nystrom_spectrum(kentropy::GaussianKernel{sigma}, d, grid,
                                          k_max)
            .spectrum.values;
      },
      py::arg("sigma"), py::arg("nodes"), py::arg("k_max"), py::arg("lo") = -1.0,
      py::arg("hi") = 1.0,
      "Quadrature-discretized integral-operator eigenvalues of the Gaussian "
      "kernel on [lo, hi] with the Lebesgue measure.");
  m.def(
      "tensor_spectrum",
      [](const std::vector<std::vector<double>>& factors, double cutoff,
         std::size_t max_terms) {
        std::vector<kentropy::Spectrum> parts;
        parts.reserve(factors.size());
        for (const auto& f : factors) parts.push_back(make_spectrum(f));
        return kentropy::tensor_spectrum(parts, cutoff, max_terms).values;
      },
      py::arg("factors"), py::arg("cutoff"), py::arg("max_terms") = 2000000,
      "All eigenvalue products above cutoff for a tensor-product kernel.");

  // spectral bounds -------------------------------------------------------
  m.def(
      "spectral_sum_E",
      [](double eps, const std::vector<double>& values) {
        return kentropy::spectral_sum_E(eps, make_spectrum(values));
      },
      py::arg("eps"), py::arg("values"),
      "Sum of ln(lambda_i / eps) over eigenvalues strictly above eps.");
  m.def(
      "count_above",
      [](double eps, const std::vector<double>& values) {
        return kentropy::count_above_m(eps, make_spectrum(values));
      },
      py::arg("eps"), py::arg("values"),
      "Number of eigenvalues strictly above eps.");
  m.def(
      "upper_bound_main",
      [](double eps, const std::vector<double>& values, double scale,
         const std::vector<double>& theta_grid, const std::string& convention) {
        const std::vector<double> grid =
            theta_grid.empty() ? kentropy::default_theta_grid() : theta_grid;
        return report_dict(kentropy::upper_bound_main(eps, make_spectrum(values),
                                                      scale, grid, convention));
      },
      py::arg("eps"), py::arg("values"), py::arg("scale"),
      py::arg("theta_grid") = std::vector<double>{},
      py::arg("convention") = "sup_norm",
      "Spectral covering-entropy upper bound at radius eps (nats).");
  m.def(
      "lower_bound_simple",
      [](double eps, const std::vector<double>& values, double total_mass) {
        return report_dict(
            kentropy::lower_bound_simple(eps, make_spectrum(values), total_mass));
      },
      py::arg("eps"), py::arg("values"), py::arg("total_mass"),
      "Separated-points lower bound at radius eps.");
  m.def(
      "lower_bound_main",
      [](double eps, const std::vector<double>& values, double total_mass,
         double c_universal, int delta_grid_count) {
        return report_dict(kentropy::lower_bound_main(
            eps, make_spectrum(values), total_mass, c_universal, delta_grid_count));
      },
      py::arg("eps"), py::arg("values"), py::arg("total_mass"),
      py::arg("c_universal") = 1.0, py::arg("delta_grid_count") = 512,
      "Rate-distortion lower bound at effective radius eps/2.");
  m.def(
      "lower_bound_minor",
      [](double eps, const std::vector<double>& values, double total_mass,
         double c_universal, int delta_grid_count) {
        return report_dict(kentropy::lower_bound_minor(
            eps, make_spectrum(values), total_mass, c_universal, delta_grid_count));
      },
      py::arg("eps"), py::arg("values"), py::arg("total_mass"),
      py::arg("c_universal") = 1.0, py::arg("delta_grid_count") = 512,
      "Tail-refined lower bound at effective radius eps/2.");
  m.def(
      "water_fill",
      [](double distortion, const std::vector<double>& values) {
        const kentropy::WaterFillSolution sol =
            kentropy::water_fill(distortion, make_spectrum(values));
        py::dict d;
        d["water_level"] = sol.water_level;
        d["distortion"] = sol.distortion;
        d["rate_nats"] = sol.rate_nats;
        return d;
      },
      py::arg("distortion"), py::arg("values"),
      "Gaussian rate-distortion water-filling solution.");
  m.def(
      "dpp_ellipsoid_bound",
      [](const std::vector<double>& semi_axes, double theta) {
        return kentropy::dpp_ellipsoid_bound(make_spectrum(semi_axes), theta);
      },
      py::arg("semi_axes"), py::arg("theta"),
      "Log covering number bound for an ellipsoid at unit radius.");
  m.def("default_theta_grid", &kentropy::default_theta_grid,
        "The default 49-point theta grid (0.01 .. 0.49).");

  // Gaussian product kernel ------------------------------------------------
  m.def(
      "gaussian_entropy_bound",
      [](double eps, double sigma, int n, double c_universal) {
        return report_dict(
            kentropy::gaussian_entropy_bound(eps, sigma, n, c_universal));
      },
      py::arg("eps"), py::arg("sigma"), py::arg("n"), py::arg("c_universal") = 1.0,
      "Closed-form entropy bound for the n-fold Gaussian product kernel.");
  m.def(
      "integer_point_count",
      [](double eps, double sigma, int n, bool exact) {
        return kentropy::integer_point_count(
            eps, sigma, n,
            exact ? kentropy::CountMode::Exact : kentropy::CountMode::VolumeBound);
      },
      py::arg("eps"), py::arg("sigma"), py::arg("n"), py::arg("exact") = false,
      "Lattice points under the knot-vector budget: exact enumeration (n <= 3) "
      "or the volume upper bound.");
  m.def("decay_slope_check", &kentropy::decay_slope_check, py::arg("gamma"),
        py::arg("c") = 1.0,
        "Fitted entropy-rate slope (~1/gamma) of a power-law spectrum.");

  // empirical probes --------------------------------------------------------
  m.def(
      "rademacher_certificate",
      [](double sigma, const std::vector<std::vector<double>>& points,
         const std::vector<std::pair<double, double>>& box, long trials,
         std::uint64_t seed) {
        const kentropy::Domain domain = box_domain(box);
        const Eigen::MatrixXd pts = points_matrix(points);
        const kentropy::GaussianKernel kernel{sigma};
        const kentropy::GramSpectrum gram =
            kentropy::gram_spectrum(kernel, domain, pts);
        const kentropy::McEstimate mc =
            kentropy::rademacher_mc(kernel, domain, pts, trials, seed);
        py::dict d;
        d["bound"] = kentropy::rademacher_bound(gram);
        d["mc_mean"] = mc.mean;
        d["mc_std_error"] = mc.std_error;
        d["trials"] = mc.trials;
        d["c_x"] = gram.c_x;
        d["eigenvalues"] = gram.eigenvalues;
        return d;
      },
      py::arg("sigma"), py::arg("points"),
      py::arg("box") = std::vector<std::pair<double, double>>{{-1.0, 1.0},
                                                              {-1.0, 1.0}},
      py::arg("trials") = 10000, py::arg("seed") = 0,
      "Closed-form Rademacher bound and a seeded Monte-Carlo estimate for a "
      "Gaussian-kernel point set.");
  m.def(
      "greedy_cover",
      [](const std::vector<double>& semi_axes, double eps, long sample_budget,
         std::uint64_t seed, const std::vector<double>& metric_weights) {
        return kentropy::greedy_cover(make_instance(semi_axes, metric_weights), eps,
                                      sample_budget, seed);
      },
      py::arg("semi_axes"), py::arg("eps"), py::arg("sample_budget") = 20000,
      py::arg("seed") = 0, py::arg("metric_weights") = std::vector<double>{},
      "Greedy covering count of quasi-uniform ellipsoid samples.");
  m.def(
      "greedy_pack",
      [](const std::vector<double>& semi_axes, double eps, long sample_budget,
         std::uint64_t seed, const std::vector<double>& metric_weights) {
        return kentropy::greedy_pack(make_instance(semi_axes, metric_weights), eps,
                                     sample_budget, seed);
      },
      py::arg("semi_axes"), py::arg("eps"), py::arg("sample_budget") = 20000,
      py::arg("seed") = 0, py::arg("metric_weights") = std::vector<double>{},
      "Greedy 2*eps-separated point count; lower-bounds the covering number.");
  m.def("chi_quantizer_entropy", &kentropy::chi_quantizer_entropy, py::arg("n_dof"),
        py::arg("step"),
        "Shannon entropy (nats) of the step-quantized chi distribution.");
  m.def("estimate_universal_c", &kentropy::estimate_universal_c,
        py::arg("n_dof_list"), py::arg("step_list"),
        "Empirical estimate of the quantizer-entropy universal constant.");
}
