"""From Pf(template) = f to an integer parametric solution.

Matching the coefficient of every monomial x^i y^j z^k (all exponents
< d) gives one linear equation ``A_row . u = T_row . theta`` in the unknown
entry coefficients u.  The system is solved over ZZ with a Hermite
transform; because the solution is integral it maps to a solution in every
commutative ring through Z -> R.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import (
    InternalInvariantError,
    LinearityViolation,
    NotSolvableOverZ,
    PurePowerViolation,
    StructureViolation,
)
from .intmat import from_sparse, hnf, matmul, snf, to_sparse
from .pfaffian import pf_structured
from .sympoly import Monomial3, SymbolicCoefficient, monomials, theta
from .template import PfaffianTemplate, flat_name

FORMAT_VERSION = 1


@dataclass
class LinearSystem:
    degree: int
    monomials: list  # one Monomial3 per equation
    unknowns: tuple
    thetas: tuple
    A: list  # equations x unknowns
    T: list  # equations x thetas

    def equation(self, row: int) -> tuple:
        """(unknown part, theta part) of one equation as {Symbol: int} dicts."""
        lhs = {s: v for s, v in zip(self.unknowns, self.A[row]) if v}
        rhs = {s: v for s, v in zip(self.thetas, self.T[row]) if v}
        return lhs, rhs

    def equation_text(self, row: int, naming: str = "canonical") -> str:
        """Render one equation; ``naming="flat"`` uses flat m-indices and
        Theta numbers 1..N from :func:`theta_numbering`."""
        lhs, rhs = self.equation(row)
        if naming == "flat":
            numbers = theta_numbering(self.degree)
            name = lambda s: flat_name(s, self.degree, numbers)  # noqa: E731
        else:
            name = str
        return f"{_linear_text(lhs, name)} = {_linear_text(rhs, name)}"


def _linear_text(terms: dict, name) -> str:
    if not terms:
        return "0"
    parts = []
    for s, v in sorted(terms.items(), key=lambda kv: name(kv[0])):
        body = name(s) if abs(v) == 1 else f"{abs(v)}*{name(s)}"
        if not parts:
            parts.append(body if v > 0 else f"-{body}")
        else:
            parts.append(("+ " if v > 0 else "- ") + body)
    return " ".join(parts)


def theta_numbering(d: int) -> dict:
    """Exponent triple -> 1-based display number.

    x^d, y^d, z^d come first; then the monomials with z-exponent 0, then
    with y-exponent 0, then with x-exponent 0 (each by decreasing leading
    exponent), then the mixed ones by increasing x-exponent and, within
    that, increasing y-exponent.  At d = 5 this gives the familiar
    Theta_1..Theta_21 labels.
    """
    pure = [(d, 0, 0), (0, d, 0), (0, 0, d)]
    xy = [(i, d - i, 0) for i in range(d - 1, 0, -1)]
    xz = [(i, 0, d - i) for i in range(d - 1, 0, -1)]
    yz = [(0, j, d - j) for j in range(d - 1, 0, -1)]
    mixed = [m for m in (tuple(m) for m in monomials(d)) if all(m)]
    mixed.sort(key=lambda m: (m[0], m[1]))
    order = pure + xy + xz + yz + mixed
    return {m: n for n, m in enumerate(order, start=1)}


def extract_system(T: PfaffianTemplate) -> LinearSystem:
    d = T.degree
    pf = pf_structured(T)
    bad = [m for m, c in pf.coeffs.items() if c.symbol_degree() > 1]
    if bad:
        m = max(bad)
        raise LinearityViolation(f"coefficient of {Monomial3(*m)} has symbol degree {pf.coeffs[m].symbol_degree()}")
    for m in ((d, 0, 0), (0, d, 0), (0, 0, d)):
        want = SymbolicCoefficient.symbol(theta(*m))
        got = pf.coeffs.get(m, SymbolicCoefficient.const(0))
        if got != want:
            raise PurePowerViolation(f"coefficient of {Monomial3(*m)} is {got}, expected {want}")
    u_index = {s: n for n, s in enumerate(T.unknown_symbols)}
    t_index = {s: n for n, s in enumerate(T.theta_symbols)}
    mons, A, Trows = [], [], []
    for m in monomials(d):
        if max(m) == d:
            continue
        c = pf.coeffs.get(tuple(m), SymbolicCoefficient.const(0))
        if c.constant:
            raise StructureViolation(f"coefficient of {m} has a constant term {c.constant}")
        arow = [0] * len(u_index)
        trow = [0] * len(t_index)
        trow[t_index[theta(*m)]] += 1
        for s, v in c.linear_terms().items():
            if s in u_index:
                arow[u_index[s]] += v
            elif s in t_index:
                trow[t_index[s]] -= v
            else:
                raise StructureViolation(f"orphan symbol {s} in coefficient of {m}")
        mons.append(m)
        A.append(arow)
        Trows.append(trow)
    return LinearSystem(d, mons, tuple(T.unknown_symbols), tuple(T.theta_symbols), A, Trows)


@dataclass
class ParametricSolution:
    """u = particular . theta + nullspace . t solves the system for all theta, t."""

    degree: int
    rank: int
    particular: list  # unknowns x thetas
    nullspace: list  # unknowns x free_count
    certificate: dict

    @property
    def free_count(self) -> int:
        return len(self.nullspace[0]) if self.nullspace and self.nullspace[0] else 0

    @property
    def components(self) -> int:
        return len(self.particular)

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "rank": self.rank,
            "free_count": self.free_count,
            "particular": to_sparse(self.particular),
            "nullspace": to_sparse(self.nullspace) if self.free_count else
            {"shape": [len(self.particular), 0], "entries": []},
            "certificate": self.certificate,
            "format_version": FORMAT_VERSION,
        }

    @classmethod
    def from_json(cls, obj) -> "ParametricSolution":
        if isinstance(obj, str):
            obj = json.loads(obj)
        if obj.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported solution format_version {obj.get('format_version')!r}")
        n_rows, k = obj["nullspace"]["shape"]
        nullspace = from_sparse(obj["nullspace"]) if k else [[] for _ in range(n_rows)]
        return cls(int(obj["degree"]), int(obj["rank"]), from_sparse(obj["particular"]), nullspace, obj["certificate"])

    def __eq__(self, other):
        if not isinstance(other, ParametricSolution):
            return NotImplemented
        return (
            self.degree == other.degree
            and self.rank == other.rank
            and self.particular == other.particular
            and self.nullspace == other.nullspace
            and self.certificate == other.certificate
        )


def _forward_solve(H, pivot_rows, rhs):
    """Integer y with H y = rhs, or (None, first inconsistent row, residue)."""
    y = []
    for j, p in enumerate(pivot_rows):
        acc = rhs[p] - sum(H[p][l] * y[l] for l in range(j) if H[p][l])
        q, r = divmod(acc, H[p][j])
        if r:
            return None, p, acc
        y.append(q)
    for i, row in enumerate(H):
        got = sum(v * y[l] for l, v in enumerate(row) if v)
        if got != rhs[i]:
            return None, i, rhs[i] - got
    return y, None, None


def canonical_lattice_basis(N) -> list:
    """Column HNF of N with zero columns dropped: a basis of its column
    lattice that depends only on the lattice."""
    if not N or not N[0]:
        return [[] for _ in N]
    return hnf(N).H


def reduce_modulo_lattice(v: list, basis: list) -> list:
    """Reduce v modulo the lattice spanned by the columns of an HNF basis so
    that v is in [0, pivot) at every pivot row."""
    v = list(v)
    if not basis or not basis[0]:
        return v
    for col in range(len(basis[0])):
        p = next(i for i, row in enumerate(basis) if row[col])
        q = v[p] // basis[p][col]
        if q:
            for r in range(p, len(basis)):
                b = basis[r][col]
                if b:
                    v[r] -= q * b
    return v


def solve_parametric(sys: LinearSystem) -> ParametricSolution:
    A = sys.A
    n_unknowns = len(sys.unknowns)
    herm = hnf(A, ncols=n_unknowns)
    r = herm.rank
    H, U = herm.H, herm.U
    Ur = [row[:r] for row in U]
    N = [row[r:] for row in U]

    ys = []
    for col in range(len(sys.thetas)):
        rhs = [row[col] for row in sys.T]
        y, bad_row, residue = _forward_solve(H, herm.pivot_rows, rhs)
        if y is None:
            raise NotSolvableOverZ(str(sys.thetas[col]), {"row": bad_row, "monomial": tuple(sys.monomials[bad_row]), "residue": residue})
        ys.append(y)
    # particular = Ur . Y, Y is rank x thetas
    Y = [[ys[c][j] for c in range(len(ys))] for j in range(r)]
    P = matmul(Ur, Y) if r else [[0] * len(sys.thetas) for _ in range(n_unknowns)]

    basis = canonical_lattice_basis(N)
    if basis and basis[0]:
        cols = [reduce_modulo_lattice([row[c] for row in P], basis) for c in range(len(sys.thetas))]
        P = [[cols[c][i] for c in range(len(cols))] for i in range(n_unknowns)]
    N = basis

    sm = snf([H[p] for p in herm.pivot_rows]) if r else snf([])
    certificate = {
        "solvable_over_Z": True,
        "invariant_factor_report": {
            "rank": r,
            "equations": len(A),
            "full_row_rank": r == len(A),
            "invariant_factors_all_one": all(s == 1 for s in sm.invariant_factors),
            "nonunit_invariant_factors": [s for s in sm.invariant_factors if s != 1],
        },
        "failing_theta_column": None,
    }
    sol = ParametricSolution(sys.degree, r, P, N, certificate)
    if not verify_solution(sys, sol):
        raise InternalInvariantError(f"degree {sys.degree}: A.P = T or A.N = 0 failed after solving")
    return sol


def verify_solution(sys: LinearSystem, sol: ParametricSolution) -> bool:
    """Recheck A.P == T and A.N == 0 by exact multiplication."""
    if sol.degree != sys.degree:
        return False
    if not sys.A:
        return not sol.particular or all(not any(r) for r in sol.particular)
    n = len(sys.unknowns)
    if len(sol.particular) != n or len(sol.nullspace) != n:
        return False
    if any(len(row) != len(sys.thetas) for row in sol.particular):
        return False
    if matmul(sys.A, sol.particular) != sys.T:
        return False
    if sol.free_count:
        if any(v for row in matmul(sys.A, sol.nullspace) for v in row):
            return False
    return True


def substitute(sol: ParametricSolution, theta_values: list, free_values: list | None = None) -> list:
    """Integer unknown values u = P theta + N t."""
    k = sol.free_count
    t = list(free_values) if free_values is not None else [0] * k
    if len(t) != k:
        raise ValueError(f"expected {k} free values, got {len(t)}")
    out = []
    for prow, nrow in zip(sol.particular, sol.nullspace):
        v = sum(p * th for p, th in zip(prow, theta_values) if p)
        v += sum(a * b for a, b in zip(nrow, t) if a)
        out.append(v)
    return out
