"""Spectral covering-entropy bounds for kernel unit balls."""

from ._kentropy import (
    CheckFailure,
    ConfigError,
    DomainError,
    NumericError,
    ParameterError,
    RegimeError,
    ResourceError,
    chi_quantizer_entropy,
    count_above,
    decay_slope_check,
    default_theta_grid,
    dpp_ellipsoid_bound,
    estimate_universal_c,
    gaussian_bound_spectrum,
    gaussian_eigen_bound,
    gaussian_entropy_bound,
    gaussian_nystrom_spectrum,
    greedy_cover,
    greedy_pack,
    integer_point_count,
    lower_bound_main,
    lower_bound_minor,
    lower_bound_simple,
    power_law_spectrum,
    rademacher_certificate,
    spectral_sum_E,
    tensor_spectrum,
    upper_bound_main,
    water_fill,
)

__all__ = [
    "CheckFailure",
    "ConfigError",
    "DomainError",
    "NumericError",
    "ParameterError",
    "RegimeError",
    "ResourceError",
    "chi_quantizer_entropy",
    "count_above",
    "decay_slope_check",
    "default_theta_grid",
    "dpp_ellipsoid_bound",
    "estimate_universal_c",
    "gaussian_bound_spectrum",
    "gaussian_eigen_bound",
    "gaussian_entropy_bound",
    "gaussian_nystrom_spectrum",
    "greedy_cover",
    "greedy_pack",
    "integer_point_count",
    "lower_bound_main",
    "lower_bound_minor",
    "lower_bound_simple",
    "power_law_spectrum",
    "rademacher_certificate",
    "spectral_sum_E",
    "tensor_spectrum",
    "upper_bound_main",
    "water_fill",
]

__version__ = "0.1.0"
