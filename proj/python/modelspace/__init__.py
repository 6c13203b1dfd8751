"""Embedding criteria for model spaces of inner functions.

Reports and sums come back as plain dictionaries with the same fields as the
JSON bundles written by the command-line tool.
"""

import json
from functools import wraps

from . import _core
from ._core import (
    ConfigError,
    DiscMeasure,
    InnerFunction,
    ModelspaceError,
    clark_measure,
    carleson_constant,
    derivative_modulus_boundary,
    embedding_gram,
    evaluate,
    hs_integral,
    kernel_norm,
    kernel_norm_squared_closed_form,
    level_distance,
    reproducing_kernel,
    whitney_csv,
)


def _decoded(fn):
    @wraps(fn)
    def call(*args, **kwargs):
        return json.loads(fn(*args, **kwargs))

    return call


check_carleson = _decoded(_core.check_carleson)
check_volberg_treil = _decoded(_core.check_volberg_treil)
check_V1 = _decoded(_core.check_V1)
check_V2 = _decoded(_core.check_V2)
check_thm14 = _decoded(_core.check_thm14)
luecking_sum = _decoded(_core.luecking_sum)
schatten_necessary_sum = _decoded(_core.schatten_necessary_sum)
schatten_sufficient_sum = _decoded(_core.schatten_sufficient_sum)
thm54_family_sum = _decoded(_core.thm54_family_sum)
singular_values = _decoded(_core.singular_values)


def inner_from_dict(doc):
    return InnerFunction.from_json(json.dumps(doc))


def measure_from_dict(doc, theta=None):
    return DiscMeasure.from_json(json.dumps(doc), theta if theta is not None else InnerFunction())


__all__ = [name for name in dir() if not name.startswith("_")]
