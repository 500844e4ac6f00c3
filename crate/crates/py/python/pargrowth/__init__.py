"""Growth in parabolic subgroups of SL_n(F_p), Fourier analysis on Aff(F_p)
and continued fractions with bounded partial quotients."""

from ._native import (
    AffGroup,
    ElemSet,
    SlGroup,
    borel_class_count,
    continuant,
    count_f,
    dimension_estimate,
    enumerate_f,
    expand,
    lambda_set,
    matrix_set_mod_p,
    power_intersect,
    qr_fixture,
    r_pgp_census,
    run_check,
    run_experiment,
    verify_growth,
    verify_sigma_bounds,
    zaremba_search,
)

__all__ = [
    "AffGroup",
    "ElemSet",
    "SlGroup",
    "borel_class_count",
    "continuant",
    "count_f",
    "dimension_estimate",
    "enumerate_f",
    "expand",
    "lambda_set",
    "matrix_set_mod_p",
    "power_intersect",
    "qr_fixture",
    "r_pgp_census",
    "run_check",
    "run_experiment",
    "verify_growth",
    "verify_sigma_bounds",
    "zaremba_search",
]
