import math

import pytest

import kentropy as ke


def test_gaussian_envelope_values():
    assert ke.gaussian_eigen_bound(1, 1.0) == 8.0
    assert math.isclose(
        ke.gaussian_eigen_bound(2, 1.0), 9.326575926388495, rel_tol=1e-14
    )
    spectrum = ke.gaussian_bound_spectrum(1.0, 3)
    assert spectrum == sorted(spectrum, reverse=True)


def test_upper_bound_single_eigenvalue():
    rep = ke.upper_bound_main(1.0, [1.0], 1.0, theta_grid=[0.25])
    assert math.isclose(rep["value_nats"], math.log(12.0), rel_tol=1e-12)
    assert rep["witnesses"]["theta_star"] == 0.25


def test_nystrom_matches_closed_form_leading_eigenvalue():
    values = ke.gaussian_nystrom_spectrum(1.0, 60, 6)
    assert math.isclose(values[0], 1.304193295330, rel_tol=1e-9)
    assert values == ke.gaussian_nystrom_spectrum(1.0, 60, 6)


def test_bound_ordering_power_law():
    spec = ke.power_law_spectrum(1.0, 2.0, 2000)
    scale = math.sqrt(sum(spec))
    for eps in (0.1, 0.3, 0.6):
        ub = ke.upper_bound_main(eps, spec, scale)["value_nats"]
        ub_half = ke.upper_bound_main(eps / 2.0, spec, scale)["value_nats"]
        assert ke.lower_bound_simple(eps, spec, 1.0)["value_nats"] <= ub + 1e-9
        assert ke.lower_bound_main(eps, spec, 1.0)["value_nats"] <= ub_half + 1e-9
        assert ke.lower_bound_minor(eps, spec, 1.0)["value_nats"] <= ub_half + 1e-9


def test_water_fill_rate_monotone():
    spec = [1.0, 0.5, 0.25]
    rates = [ke.water_fill(d, spec)["rate_nats"] for d in (0.1, 0.5, 1.0, 1.75)]
    assert rates == sorted(rates, reverse=True)
    assert rates[-1] == 0.0  # distortion at the trace wipes out the rate


def test_rademacher_single_point_is_exact():
    rep = ke.rademacher_certificate(1.0, [[0.3, -0.7]], trials=50, seed=7)
    assert rep["mc_mean"] == 1.0
    assert rep["mc_std_error"] == 0.0
    assert math.isclose(rep["bound"], 9.846486606915079, rel_tol=1e-14)


def test_greedy_cover_window_and_determinism():
    count = ke.greedy_cover([4.0], 0.5, sample_budget=20000, seed=3)
    assert 8 <= count <= 17
    assert count == ke.greedy_cover([4.0], 0.5, sample_budget=20000, seed=3)
    assert ke.greedy_pack([4.0], 0.5, sample_budget=20000, seed=3) <= count


def test_quantizer_entropy():
    assert math.isclose(
        ke.chi_quantizer_entropy(1, 0.5), 1.4292481715972716, rel_tol=1e-9
    )
    assert ke.chi_quantizer_entropy(1, 0.25) > ke.chi_quantizer_entropy(1, 0.5)


def test_errors_are_python_exceptions():
    with pytest.raises(ValueError):
        ke.upper_bound_main(-1.0, [1.0], 1.0)
    with pytest.raises(ValueError):
        ke.dpp_ellipsoid_bound([2.0, 1.0], 0.5)
    with pytest.raises(ValueError):
        ke.gaussian_entropy_bound(0.5, 10.0, 1)  # outside the validity regime
