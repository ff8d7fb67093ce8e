"""Noncommutative hyperbolic metrics, nc functions and operator-valued free convolution.

Specs (domains, functions, models, cp maps) are JSON strings in the same format the
``ncmetric`` command line tool reads. Points and directions are complex numpy arrays.
"""

import json as _json

from ._ncmetric import (
    NcError,
    bounded_tilde_counterexample,
    cauchy_G,
    contains,
    convolved_G,
    d_upper,
    delta,
    delta_f,
    delta_tilde,
    density_grid,
    dtilde_upper,
    eval_function,
    matrix_convexity_counterexample,
    properties_report,
    run_properties,
    subordination,
)


def spec(obj):
    """Serialize a dict spec to the JSON string the bindings expect."""
    return obj if isinstance(obj, str) else _json.dumps(obj)


def matrix_spec(arr):
    """JSON object for a complex matrix: {"rows", "cols", "data"} with [re, im] entries."""
    import numpy as np

    a = np.atleast_2d(np.asarray(arr, dtype=complex))
    return {
        "rows": a.shape[0],
        "cols": a.shape[1],
        "data": [[[float(v.real), float(v.imag)] for v in row] for row in a],
    }


__all__ = [
    "NcError",
    "bounded_tilde_counterexample",
    "cauchy_G",
    "contains",
    "convolved_G",
    "d_upper",
    "delta",
    "delta_f",
    "delta_tilde",
    "density_grid",
    "dtilde_upper",
    "eval_function",
    "matrix_convexity_counterexample",
    "matrix_spec",
    "properties_report",
    "run_properties",
    "spec",
    "subordination",
]
