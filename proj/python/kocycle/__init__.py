"""k-coloured skeletons, factorisation rules and unitary cocycles.

The compiled core speaks JSON strings; this package converts to and from
plain dicts so callers never touch serialized text.
"""

import json

from ._core import (
    InvalidArgument,
    ParseError,
    Skeleton as _Skeleton,
)
from . import _core

__all__ = [
    "Skeleton",
    "ParseError",
    "InvalidArgument",
    "tensor_rule",
    "validate_rule",
    "validate_phases",
    "constant_phases",
    "enumerate_rules",
    "derive_cocycle",
    "random_cocycle",
    "cocycle_residual",
    "residual_report",
    "gauge_orbit_sample",
    "geodesic",
    "search_path",
    "ktheory",
    "smith",
]


class Skeleton(_Skeleton):
    """k-coloured skeleton built from a dict or loaded from a file."""

    def __init__(self, doc):
        if isinstance(doc, dict):
            doc = json.dumps(doc)
        super().__init__(doc)

    def to_dict(self):
        return json.loads(self.to_json())

    def validate(self):
        return json.loads(super().validate())


def tensor_rule(skeleton):
    return json.loads(_core.tensor_rule(skeleton))


def validate_rule(skeleton, rule):
    return json.loads(_core.validate_rule(skeleton, json.dumps(rule)))


def validate_phases(skeleton, rule, phases):
    return json.loads(
        _core.validate_phases(skeleton, json.dumps(rule), json.dumps(phases))
    )


def constant_phases(skeleton, z):
    return json.loads(_core.constant_phases(skeleton, complex(z)))


def enumerate_rules(skeleton, limit=None):
    args = (skeleton,) if limit is None else (skeleton, limit)
    rules, status = _core.enumerate_rules(*args)
    return [json.loads(rule) for rule in rules], status


def derive_cocycle(skeleton, rule, phases):
    return json.loads(
        _core.derive_cocycle(skeleton, json.dumps(rule), json.dumps(phases))
    )


def random_cocycle(skeleton, seed=0):
    return json.loads(_core.random_cocycle(skeleton, seed))


def cocycle_residual(skeleton, unitary):
    return _core.cocycle_residual(skeleton, json.dumps(unitary))


def residual_report(skeleton, unitary):
    return json.loads(_core.residual_report(skeleton, json.dumps(unitary)))


def gauge_orbit_sample(skeleton, unitary, seed=0):
    return json.loads(
        _core.gauge_orbit_sample(skeleton, json.dumps(unitary), seed)
    )


def geodesic(skeleton, u0, u1, samples=64):
    return json.loads(
        _core.geodesic(skeleton, json.dumps(u0), json.dumps(u1), samples)
    )


def search_path(skeleton, u0, u1, samples=64, tol=1e-8, seed=0):
    success, doc, message = _core.search_path(
        skeleton, json.dumps(u0), json.dumps(u1), samples, tol, seed
    )
    return success, json.loads(doc), message


def ktheory(m1, m2):
    return json.loads(_core.ktheory(m1, m2))


def smith(matrix):
    doc = json.loads(_core.smith(matrix))
    return {
        "d": [[int(x) for x in row] for row in doc["d"]],
        "l": [[int(x) for x in row] for row in doc["l"]],
        "r": [[int(x) for x in row] for row in doc["r"]],
        "invariant_factors": [int(x) for x in doc["invariant_factors"]],
    }
