"""Linear Pfaffian representations of plane curves over any commutative ring."""

from __future__ import annotations

from .coeffring import QQ, ZZ, ModularRing, RingValue, parse_ring
from .errors import PfaffrepError
from .linsolve import extract_system, solve_parametric, verify_solution
from .pfaffian import SkewMatrix, det, pf_laplace, pf_matchings, pf_structured
from .represent import Representation, build_representation, sweep, verify_representation
from .sympoly import TriPoly, parse_tripoly
from .template import build_template

__all__ = [
    "QQ",
    "ZZ",
    "ModularRing",
    "PfaffrepError",
    "Representation",
    "RingValue",
    "SkewMatrix",
    "TriPoly",
    "build_representation",
    "build_template",
    "det",
    "extract_system",
    "parse_ring",
    "parse_tripoly",
    "pf_laplace",
    "pf_matchings",
    "pf_structured",
    "solve_parametric",
    "sweep",
    "verify_representation",
    "verify_solution",
]

__version__ = "0.1.0"
