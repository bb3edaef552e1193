"""The 2d x 2d symbolic skew matrix whose Pfaffian is matched against f.

Layout (1-based, size 2d):

* upper-left (d+1) x (d+1) block: every entry (i, j) is an unknown linear
  form a[i,j]*x + b[i,j]*y + c[i,j]*z, except that the x-slot of (1,2), the
  y-slot of (2,3) and the z-slot of (3,4) hold Theta[d,0,0], Theta[0,d,0],
  Theta[0,0,d] instead of an unknown;
* right block (rows 1..d+1, columns d+2..2d): fixed staircase of +-x, +-y,
  +-z (see :func:`staircase`);
* bottom-right (d-1) x (d-1) block: zero.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb

from .errors import DegreeCapExceeded, UnsupportedDegree
from .pfaffian import LinearForm, SkewMatrix
from .sympoly import (
    SYMBOLIC,
    Symbol,
    SymbolicCoefficient,
    entry,
    monomials,
    parse_symbol,
    theta,
)

DEGREE_CAP = 25
MIN_DEGREE = 5
FORMAT_VERSION = 1

_S = SymbolicCoefficient


@dataclass(frozen=True)
class PfaffianTemplate:
    degree: int
    matrix: SkewMatrix
    unknown_symbols: tuple
    theta_symbols: tuple

    def __eq__(self, other):
        if not isinstance(other, PfaffianTemplate):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.matrix == other.matrix
            and self.unknown_symbols == other.unknown_symbols
            and self.theta_symbols == other.theta_symbols
        )

    def __hash__(self):
        return hash((self.degree, self.unknown_symbols))


def check_degree(d: int, degree_cap: int = DEGREE_CAP, allow_unverified: bool = False):
    if d < MIN_DEGREE:
        raise UnsupportedDegree(
            f"degree {d} is not supported: the template method starts at d = {MIN_DEGREE}; "
            "degrees 2..4 need a different construction"
        )
    if d > degree_cap and not allow_unverified:
        raise DegreeCapExceeded(
            f"degree {d} exceeds the verified range (cap {degree_cap}); "
            "pass allow_unverified / --allow-unverified to try it anyway"
        )


def staircase(d: int) -> dict:
    """Fixed right block as {(row, col): (a, b, c)} with small-int coefficients."""
    X, Y, Z = (1, 0, 0), (0, 1, 0), (0, 0, 1)

    def neg(v):
        return tuple(-t for t in v)

    out = {
        (1, d + 2): neg(Y),
        (2, d + 2): neg(Z),
        (d + 1, d + 2): X,
        (1, d + 3): neg(Z),
        (d, d + 3): X,
        (d + 1, d + 3): Y,
    }
    for k in range(2, d - 1):
        col = d + 2 + k
        out[(d + 1 - k, col)] = X
        out[(d + 2 - k, col)] = neg(Y)
        out[(d + 3 - k, col)] = (0, 0, (-1) ** d) if k == 2 else neg(Z)
    return out


def _theta_slots(d: int) -> dict:
    # (row, col) -> (axis index, theta symbol)
    return {
        (1, 2): (0, theta(d, 0, 0)),
        (2, 3): (1, theta(0, d, 0)),
        (3, 4): (2, theta(0, 0, d)),
    }


def build_template(d: int, degree_cap: int = DEGREE_CAP, allow_unverified: bool = False) -> PfaffianTemplate:
    check_degree(d, degree_cap, allow_unverified)
    slots = _theta_slots(d)
    upper = {}
    unknowns = []
    for i in range(1, d + 2):
        for j in range(i + 1, d + 2):
            coeffs = []
            slot = slots.get((i, j))
            for axis_idx, axis in enumerate("abc"):
                if slot is not None and slot[0] == axis_idx:
                    coeffs.append(_S.symbol(slot[1]))
                else:
                    s = entry(axis, i, j)
                    unknowns.append(s)
                    coeffs.append(_S.symbol(s))
            upper[(i, j)] = LinearForm(*coeffs)
    for key, (a, b, c) in staircase(d).items():
        upper[key] = LinearForm(_S.const(a), _S.const(b), _S.const(c))
    thetas = tuple(theta(*m) for m in monomials(d))
    return PfaffianTemplate(d, SkewMatrix(2 * d, upper, SYMBOLIC), tuple(unknowns), thetas)


def counts(d: int) -> dict:
    if d < MIN_DEGREE:
        raise UnsupportedDegree(f"degree {d} is below {MIN_DEGREE}")
    return {
        "matrix_size": 2 * d,
        "unknowns": 3 * comb(d + 1, 2) - 3,
        "equations": comb(d + 2, 2) - 3,
        "thetas": comb(d + 2, 2),
    }


def m_index(i: int, j: int, d: int) -> int:
    """Row-major position of (i, j) in the strict upper triangle of a 2d x 2d matrix."""
    if not 1 <= i < j <= 2 * d:
        raise ValueError(f"({i},{j}) is not strictly above the diagonal")
    return sum(2 * d - r for r in range(1, i)) + (j - i)


def m_index_pair(m: int, d: int) -> tuple:
    n = 2 * d
    i = 1
    while m > n - i:
        m -= n - i
        i += 1
    return i, i + m


def flat_name(s: Symbol, d: int, theta_numbers: dict | None = None) -> str:
    """Flat display name: ``b1`` for b[1,2], ``a13`` for a[2,6] at d=5, and
    ``Theta<n>`` for thetas when a numbering is supplied."""
    if s.kind in "abc":
        return f"{s.kind}{m_index(*s.idx, d)}"
    if s.kind == "theta" and theta_numbers is not None:
        return f"Theta{theta_numbers[s.idx]}"
    return str(s)


def render(T: PfaffianTemplate, fmt: str = "text") -> str:
    if fmt == "json":
        return json.dumps(template_to_json(T), indent=2)
    if fmt == "text":
        lines = [f"# degree {T.degree}, size {T.matrix.size}x{T.matrix.size}"]
        for (i, j) in sorted(T.matrix.upper):
            lines.append(f"({i},{j}): {T.matrix.upper[(i, j)]}")
        return "\n".join(lines) + "\n"
    if fmt == "latex":
        return _render_latex(T)
    raise ValueError(f"unknown format {fmt!r}")


def template_to_json(T: PfaffianTemplate) -> dict:
    return {
        "degree": T.degree,
        "matrix": T.matrix.to_json(),
        "unknowns": [str(s) for s in T.unknown_symbols],
        "thetas": [str(s) for s in T.theta_symbols],
        "format_version": FORMAT_VERSION,
    }


def template_from_json(obj) -> PfaffianTemplate:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported template format_version {obj.get('format_version')!r}")
    return PfaffianTemplate(
        int(obj["degree"]),
        SkewMatrix.from_json(obj["matrix"], SYMBOLIC),
        tuple(parse_symbol(s) for s in obj["unknowns"]),
        tuple(parse_symbol(s) for s in obj["thetas"]),
    )


def _latex_entry(M: SkewMatrix, i: int, j: int) -> str:
    p = M.entry(i, j)
    if not p.coeffs:
        return "0"
    text = str(p).replace("*", "").replace("Theta[", "\\Theta_{")
    for axis in "abc":
        text = text.replace(f"{axis}[", f"{axis}_{{")
    return text.replace("]", "}")


def _render_latex(T: PfaffianTemplate) -> str:
    d = T.degree
    M = T.matrix
    n = 2 * d
    top = []
    for i in range(1, d + 2):
        cells = [_latex_entry(M, i, j) if j > i else ("0" if j == i else "*") for j in range(1, n + 1)]
        top.append(" & ".join(cells))
    zero_block = f"\\multicolumn{{{d - 1}}}{{c}}{{\\mathbf{{0_{{{d - 1}}}}}}}"
    bottom = []
    for i in range(d + 2, n + 1):
        cells = [_latex_entry(M, i, j) for j in range(1, d + 2)]
        if i == d + 2:
            cells.append(zero_block)
        bottom.append(" & ".join(cells))
    body = " \\\\\n".join(top) + " \\\\ \\hline\n" + " \\\\\n".join(bottom)
    colspec = "c" * (d + 1) + "|" + "c" * (d - 1)
    return f"\\left[\\begin{{array}}{{{colspec}}}\n{body}\n\\end{{array}}\\right]\n"
