#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "kentropy/config.hpp"
#include "kentropy/spectrum.hpp"

using namespace kentropy;

namespace {

struct TestSystem {
  KernelSpec kernel;
  Domain domain;
  Grid grid;
  EigenSystem system;
};

TestSystem gaussian_system(double sigma, int nodes, int k_max) {
  TestSystem t;
  t.kernel = GaussianKernel{sigma};
  t.domain.box.resize(1, 2);
  t.domain.box << -1.0, 1.0;
  Measure lebesgue;
  lebesgue.kind = MeasureKind::UniformLebesgue;
  t.grid = build_grid(t.domain, lebesgue, nodes);
  t.system = nystrom_spectrum(t.kernel, t.domain, t.grid, k_max);
  return t;
}

Spectrum make_spectrum(std::vector<double> values) {
  Spectrum s;
  s.source = "explicit";
  s.values = std::move(values);
  return s;
}

}  // namespace

TEST_CASE("spectrum invariants") {
  CHECK_NOTHROW(make_spectrum({4, 2, 1}).validate());
  CHECK_THROWS_AS(make_spectrum({1, 2}).validate(), ConfigError);    // ascending
  CHECK_THROWS_AS(make_spectrum({1, -0.5}).validate(), ConfigError);  // negative
  CHECK(make_spectrum({4, 2, 1}).trace() == doctest::Approx(7.0));
}

TEST_CASE("gaussian eigenvalue decay bound") {
  CHECK(gaussian_eigen_bound(1, 1.0) == 8.0);
  CHECK(gaussian_eigen_bound(1, 0.25) == 8.0);
  // k = 2: 8 * sqrt(e/2), evaluated in log space
  CHECK(gaussian_eigen_bound(2, 1.0) ==
        doctest::Approx(9.326575926388495).epsilon(1e-14));
  // k = 3: 2e
  CHECK(gaussian_eigen_bound(3, 1.0) ==
        doctest::Approx(2.0 * std::exp(1.0)).epsilon(1e-14));
  CHECK(gaussian_eigen_bound(21, 1.0) ==
        doctest::Approx(1.6804859767766352e-11).epsilon(1e-12));
  // super-exponential decay beyond the hump
  for (int k = 5; k < 30; ++k) {
    CHECK(gaussian_eigen_bound(k + 1, 1.0) < gaussian_eigen_bound(k, 1.0));
  }
  CHECK_THROWS_AS(gaussian_eigen_bound(0, 1.0), ParameterError);
  CHECK_THROWS_AS(gaussian_eigen_bound(2, 0.0), ParameterError);

  const Spectrum s = gaussian_bound_spectrum(1.0, 3);
  REQUIRE(s.size() == 3);
  // sorted descending: the k = 2 bound exceeds the k = 1 bound for sigma = 1
  CHECK(s.values[0] == doctest::Approx(9.326575926388495).epsilon(1e-14));
  CHECK(s.values[1] == 8.0);
  CHECK(s.values[2] == doctest::Approx(5.43656365691809).epsilon(1e-13));
}

TEST_CASE("nystrom spectrum of the gaussian kernel") {
  const TestSystem t = gaussian_system(1.0, 200, 30);
  const std::vector<double>& lam = t.system.spectrum.values;
  REQUIRE(lam.size() == 30);

  const std::vector<double> expected = {1.304193295330, 0.535957317589,
                                        0.133950424663, 0.022710778569,
                                        0.002872614409, 0.000289463126};
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(lam[k] == doctest::Approx(expected[k]).epsilon(1e-9));
  }

  // discrete trace identity: the full eigenvalue sum equals the integral of
  // K(x,x) = 1 over [-1,1]; the kept 30 already capture it to machine level
  double sum = 0.0;
  for (double v : lam) sum += v;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-12));

  // eigenfunctions are orthonormal in the quadrature inner product
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b <= a; ++b) {
      double dot = 0.0;
      for (long i = 0; i < t.grid.size(); ++i) {
        dot += t.grid.weights[i] * t.system.eigvecs(i, a) * t.system.eigvecs(i, b);
      }
      CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).scale(1.0).epsilon(1e-10));
    }
  }

  // sup of the leading eigenfunction and the induced sup-norm constant
  double sup_phi = 0.0;
  for (long i = 0; i < t.grid.size(); ++i) {
    sup_phi = std::max(sup_phi, std::abs(t.system.eigvecs(i, 0)));
  }
  CHECK(sup_phi == doctest::Approx(0.8343688224091894).epsilon(1e-9));
  CHECK(std::sqrt(lam[0]) * sup_phi ==
        doctest::Approx(0.952859897018103).epsilon(1e-9));

  CHECK_THROWS_AS(nystrom_spectrum(t.kernel, t.domain, t.grid, 0), ParameterError);
  CHECK_THROWS_AS(nystrom_spectrum(t.kernel, t.domain, t.grid, 201), ParameterError);
}

TEST_CASE("nystrom eigenvalues respect the closed-form decay bound") {
  for (double sigma : {0.5, 1.0, 2.0}) {
    const TestSystem t = gaussian_system(sigma, 200, 40);
    const std::vector<double>& lam = t.system.spectrum.values;
    const double floor = 1e3 * 2.220446049250313e-16 * lam[0];
    for (std::size_t k = 0; k < lam.size(); ++k) {
      if (lam[k] <= floor) break;  // below numerical trust
      CHECK(lam[k] <= gaussian_eigen_bound(static_cast<int>(k) + 1, sigma) + 1e-9);
    }
  }
}

TEST_CASE("nystrom top eigenvalues across bandwidths") {
  CHECK(gaussian_system(0.5, 200, 5).system.spectrum.values[0] ==
        doctest::Approx(1.729683354789).epsilon(1e-9));
  CHECK(gaussian_system(1.0, 200, 5).system.spectrum.values[0] ==
        doctest::Approx(1.304193295330).epsilon(1e-9));
  CHECK(gaussian_system(2.0, 200, 5).system.spectrum.values[0] ==
        doctest::Approx(0.797213605289).epsilon(1e-9));
}

TEST_CASE("constant kernel is rank one") {
  TabulatedKernel tab;
  tab.nodes.resize(4, 1);
  tab.nodes << 0.1, 0.3, 0.6, 0.9;
  tab.values = Eigen::MatrixXd::Ones(4, 4);
  Domain d;
  d.box.resize(1, 2);
  d.box << 0.0, 1.0;
  Measure emp;
  emp.kind = MeasureKind::Empirical;
  emp.points = tab.nodes;
  const Grid g = build_grid(d, emp, 10);
  const EigenSystem sys = nystrom_spectrum(tab, d, g, 4);
  CHECK(sys.spectrum.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (int k = 1; k < 4; ++k) {
    CHECK(sys.spectrum.values[k] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
}

TEST_CASE("tensor product spectrum") {
  const Spectrum a = make_spectrum({4, 2, 1});
  const Spectrum b = make_spectrum({3, 1});
  const Spectrum prod = tensor_spectrum({a, b}, 2.0);
  // products of {4,2,1} x {3,1} that reach the cutoff 2: 12, 6, 4, 3, 2
  REQUIRE(prod.size() == 5);
  CHECK(prod.values[0] == doctest::Approx(12.0));
  CHECK(prod.values[1] == doctest::Approx(6.0));
  CHECK(prod.values[2] == doctest::Approx(4.0));
  CHECK(prod.values[3] == doctest::Approx(3.0));
  CHECK(prod.values[4] == doctest::Approx(2.0));
  CHECK(prod.truncation_note.empty());

  const Spectrum capped = tensor_spectrum({a, b}, 1e-9, 3);
  CHECK(capped.size() == 3);
  CHECK_FALSE(capped.truncation_note.empty());

  CHECK_THROWS_AS(tensor_spectrum({}, 1.0), ParameterError);
  CHECK_THROWS_AS(tensor_spectrum({a}, 0.0), ParameterError);
}

TEST_CASE("power-law spectrum") {
  const Spectrum s = power_law_spectrum(2.0, 1.0, 4);
  REQUIRE(s.size() == 4);
  CHECK(s.values[0] == doctest::Approx(2.0));
  CHECK(s.values[1] == doctest::Approx(1.0));
  CHECK(s.values[2] == doctest::Approx(2.0 / 3.0));
  CHECK(s.values[3] == doctest::Approx(0.5));
  CHECK_THROWS_AS(power_law_spectrum(0.0, 1.0, 4), ParameterError);
  CHECK_THROWS_AS(power_law_spectrum(1.0, -1.0, 4), ParameterError);
}

TEST_CASE("mercer reconstruction tail") {
  const TestSystem t = gaussian_system(1.0, 120, 40);
  const double tail0 = mercer_tail(t.system, t.kernel, t.domain, t.grid, 0);
  CHECK(tail0 == doctest::Approx(1.0).epsilon(1e-12));  // sup sqrt(K(x,x))
  const double tail3 = mercer_tail(t.system, t.kernel, t.domain, t.grid, 3);
  const double tail10 = mercer_tail(t.system, t.kernel, t.domain, t.grid, 10);
  const double tail40 = mercer_tail(t.system, t.kernel, t.domain, t.grid, 40);
  CHECK(tail3 > tail10);
  CHECK(tail10 >= tail40);
  // full reconstruction closes the kernel diagonal down to the square root
  // of the eigensolver residual (~1e-14), so ~1e-7 is the attainable floor
  CHECK(tail40 <= 1e-6);
  CHECK_THROWS_AS(mercer_tail(t.system, t.kernel, t.domain, t.grid, 41),
                  ParameterError);
}

TEST_CASE("spectrum CSV round trip") {
  const Spectrum s = make_spectrum({1.5, 0.25, 1e-17});
  std::ostringstream out;
  write_spectrum_csv(out, s);
  const std::string text = out.str();
  CHECK(text.rfind("#kernel-entropy v1\nindex,lambda\n", 0) == 0);

  std::istringstream in(text);
  const Spectrum back = read_spectrum_csv(in);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.values[i] == s.values[i]);  // %.17g is lossless for doubles
  }

  std::istringstream missing("1,0.5\n2,0.25\n");
  CHECK_THROWS_AS(read_spectrum_csv(missing), ConfigError);
  std::istringstream ascending("index,lambda\n1,0.5\n2,0.75\n");
  CHECK_THROWS_AS(read_spectrum_csv(ascending), ConfigError);
  std::istringstream garbage("index,lambda\n1,abc\n");
  CHECK_THROWS_AS(read_spectrum_csv(garbage), ConfigError);
}

TEST_CASE("spectrum config block") {
  const Json explicit_cfg = Json::parse(
      R"({"spectrum": {"source": "explicit", "values": [4, 2, 1]}})");
  Json sidecar;
  const Spectrum s = spectrum_from_json(explicit_cfg, nullptr, &sidecar);
  CHECK(s.size() == 3);
  CHECK(sidecar["source"] == "explicit");
  CHECK(sidecar["trace"].get<double>() == doctest::Approx(7.0));

  // a corrupted (ascending) spectrum is rejected before any computation
  const Json corrupted = Json::parse(
      R"({"spectrum": {"source": "explicit", "values": [1, 2, 4]}})");
  CHECK_THROWS_AS(spectrum_from_json(corrupted, nullptr, nullptr), ConfigError);

  const Json power = Json::parse(
      R"({"spectrum": {"source": "power_law", "c": 1.0, "gamma": 2.0, "count": 10}})");
  CHECK(spectrum_from_json(power, nullptr, nullptr).size() == 10);

  const Json nystrom_cfg = Json::parse(
      R"({"spectrum": {"source": "nystrom", "k_max": 5}})");
  CHECK_THROWS_AS(spectrum_from_json(nystrom_cfg, nullptr, nullptr), ConfigError);

  const Json unknown = Json::parse(R"({"spectrum": {"source": "magic"}})");
  CHECK_THROWS_AS(spectrum_from_json(unknown, nullptr, nullptr), ConfigError);
}
