#pragma once

#include <map>
#include <string>
#include <vector>

#include "kentropy/spectrum.hpp"

namespace kentropy {

// Result of a single covering-entropy bound evaluation.  value is in nats;
// the witnesses carry every number needed to re-derive it.
struct EntropyBoundReport {
  double epsilon = 0.0;
  double effective_radius = 0.0;
  double value_nats = 0.0;
  std::map<std::string, double> witnesses;
  std::string convention;
  std::string spectrum_source;
  bool fallback = false;

  double value_bits() const;
};

// E(eps, lambda) = sum over lambda_i > eps (strictly) of ln(lambda_i / eps).
double spectral_sum_E(double eps, const Spectrum& spectrum);

// Number of eigenvalues strictly above eps.
long count_above_m(double eps, const Spectrum& spectrum);

// Log covering number of the ellipsoid with the given semi-axes at unit
// radius: E(1, axes) + ln(3/theta) * #{axes >= 1 - theta}; theta in (0, 1/2).
double dpp_ellipsoid_bound(const Spectrum& semi_axes, double theta);

// 49 uniform points 0.01, 0.02, ..., 0.49.
std::vector<double> default_theta_grid();

// Spectral upper bound on the unit-ball covering entropy at radius eps:
// min over the theta grid of E(eps/scale) + m_{(1-theta) eps/scale} ln(3/theta).
// scale is the sup-norm constant D_K or sqrt(lambda_1) for the L2 variant.
EntropyBoundReport upper_bound_main(double eps, const Spectrum& spectrum,
                                    double scale,
                                    const std::vector<double>& theta_grid,
                                    const std::string& convention = "sup_norm");

struct WaterFillSolution {
  double water_level = 0.0;
  double distortion = 0.0;
  double rate_nats = 0.0;  // (1/2) E(water_level)
};

// Solves sum_i min(lambda_i, level) = distortion by bisection (1e-12
// relative); distortion >= trace is reported as rate 0 at level lambda_1.
WaterFillSolution water_fill(double distortion, const Spectrum& spectrum);

// Separated-points lower bound: value = ln(max(N_delta, 1)) with
// delta = eps^2 * total_mass / 2; the raw count is in the witnesses.
EntropyBoundReport lower_bound_simple(double eps, const Spectrum& spectrum,
                                      double total_mass);

// Rate-distortion lower bound at effective radius eps/2: value =
// E(delta*)/4 at the smallest feasible delta.  Falls back to
// lower_bound_simple at radius eps/2 when no delta is feasible.
EntropyBoundReport lower_bound_main(double eps, const Spectrum& spectrum,
                                    double total_mass, double c_universal = 1.0,
                                    int delta_grid_count = 512);

// Tail-refined lower bound at effective radius eps/2: maximizes over delta
// of E(delta)/2 + 2C ln(f_max(delta)/sqrt(lambda_1)), where f_max is the
// best tail split f(delta, M); clamped at 0.
EntropyBoundReport lower_bound_minor(double eps, const Spectrum& spectrum,
                                     double total_mass, double c_universal = 1.0,
                                     int delta_grid_count = 512);

// Closed-form entropy bound for the n-fold Gaussian product kernel; grows
// like ln^{n+1}(1/eps) / lnln^n(1/eps).  Throws RegimeError when no summand
// q in {1..n} satisfies the validity condition.
EntropyBoundReport gaussian_entropy_bound(double eps, double sigma, int n,
                                          double c_universal = 1.0);

// Knot-vector shape function; x/2 ln(2x/e) - x ln(sigma), with u(0) = 0.
double gaussian_u(double x, double sigma);
// min(u(r), u(r+1)) at r = floor(sigma^2 / 2): the lattice minimum of u.
double gaussian_delta(double sigma);

enum class CountMode { Exact, VolumeBound };

// Number of non-negative integer lattice points with sum_j u(x_j) < D,
// D = ln(1/eps) + n ln 8.  Exact enumeration for n <= 3; the volume-based
// upper bound otherwise dominates the exact count.
double integer_point_count(double eps, double sigma, int n, CountMode mode);

// Fits the log-log slope of E(c/N^gamma) against ln(1/eps) over
// N in {1e2, 1e3, 1e4, 1e5}; also asserts E(c/N^gamma) <= N gamma (ln 2 +
// sqrt 2) for each N (CheckFailure otherwise).  Returns the slope (~1/gamma).
double decay_slope_check(double gamma, double c = 1.0);

}  // namespace kentropy
