"""Exact Hodge structures, nilpotent orbits and Chern-Weil integrals on period domains.

Structured inputs are plain Python objects (lists of rows, dicts in the same
layout as the command-line JSON files); results come back as dicts.
"""

import json as _json
import os as _os

# installed wheels carry the family data next to the package
_here = _os.path.join(_os.path.dirname(__file__), "data")
if "HODGE_MODULI_DATA" not in _os.environ and _os.path.isdir(_here):
    _os.environ["HODGE_MODULI_DATA"] = _here

from . import _core  # noqa: E402
from ._core import (  # noqa: E402
    DegeneracyError,
    DomainError,
    InputError,
    PrecisionError,
    StructuralError,
    classify_cone_region,
    poincare_log_mass,
)

__all__ = [
    "weight_filtration",
    "verify_hodge",
    "check_mhs",
    "classify_cone_region",
    "rationality",
    "monodromy",
    "integrate",
    "poincare_log_mass",
    "versions",
    "InputError",
    "StructuralError",
    "DegeneracyError",
    "PrecisionError",
    "DomainError",
]


def _text(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def weight_filtration(matrix, center=0):
    """Monodromy weight filtration of a rational nilpotent matrix (rows of ints or "p/q")."""
    return _json.loads(_core.weight_filtration(_text(matrix), center))


def verify_hodge(structure):
    return _json.loads(_core.verify_hodge(_text(structure)))


def check_mhs(structure):
    return _json.loads(_core.check_mhs(_text(structure)))


def rationality(value, max_den=100, tol=1e-3):
    return _json.loads(_core.rationality(float(value), max_den, tol))


def monodromy(family="mirror_quintic", point="LCS", vertices=24, precision=256):
    return _json.loads(_core.monodromy(family, point, vertices, precision))


def integrate(family, form, eps=(), profile=1, extrapolate=True, precision=256):
    """Cut-off regularized integral of a named top form, with its eps table.

    ``family`` is a bundled family name or "upper-half-plane" (modular domain).
    """
    return _json.loads(_core.integrate(family, form, list(eps), profile, extrapolate, precision))


def versions():
    return _json.loads(_core.versions())
