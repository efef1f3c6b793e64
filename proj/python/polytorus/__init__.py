"""Monomial-indexed series on the infinite torus: exact p=2 norms, Monte Carlo
norm estimation under graded dilation, coefficient randomization, and the
Dirichlet-series bridge.

The heavy lifting lives in the compiled extension ``_polytorus``; report-style
results cross the boundary as JSON and are exposed here as dicts.
"""

import json as _json

from ._polytorus import (  # noqa: F401
    CoefficientSeries,
    DilatedSeries,
    DirichletPolynomial,
    MonomialIndex,
    NormEstimate,
    RandomModel,
    Realization,
    RngStream,
    __version__,
    besicovitch_default_step,
    bohr_inverse,
    bohr_lift,
    dilate,
    dilation_compose_error,
    enumerate_indices,
    evaluate_dirichlet,
    factorize,
    family_is_l2,
    family_names,
    in_abschnitt,
    index_of,
    make_family,
    mc_norm,
    multiplier_apply,
    norm2_exact,
    norm2_exact_dilated,
    norm_profile,
    nth_prime,
    partial_sum,
    profile_monotone_ok,
    randomize,
    vertical_translate,
    weight_of,
)
from ._polytorus import (
    besicovitch_norm as _besicovitch_norm,
    gaussian_tail_bound as gaussian_tail_bound,
    geometric_weight_sum as _geometric_weight_sum,
    isometry_check as _isometry_check,
    operator_norm_estimate as _operator_norm_estimate,
    randomized_moment as _randomized_moment,
    root_test as _root_test,
    run_bohr as _run_bohr,
    run_dichotomy as _run_dichotomy,
    run_khintchine as _run_khintchine,
    run_mean_shift as _run_mean_shift,
)


def _wrap_json(fn):
    def wrapped(*args, **kwargs):
        return _json.loads(fn(*args, **kwargs))

    wrapped.__name__ = fn.__name__
    wrapped.__doc__ = fn.__doc__
    return wrapped


besicovitch_norm = _wrap_json(_besicovitch_norm)
geometric_weight_sum = _wrap_json(_geometric_weight_sum)
isometry_check = _wrap_json(_isometry_check)
operator_norm_estimate = _wrap_json(_operator_norm_estimate)
randomized_moment = _wrap_json(_randomized_moment)
root_test = _wrap_json(_root_test)


def _wrap_experiment(fn):
    def wrapped(config):
        if isinstance(config, dict):
            config = _json.dumps(config)
        return _json.loads(fn(config))

    wrapped.__name__ = fn.__name__
    return wrapped


run_bohr = _wrap_experiment(_run_bohr)
run_dichotomy = _wrap_experiment(_run_dichotomy)
run_khintchine = _wrap_experiment(_run_khintchine)
run_mean_shift = _wrap_experiment(_run_mean_shift)
