"""Skew-symmetric matrices of linear forms and their Pfaffians.

Three independent routes to the Pfaffian are provided:

* :func:`pf_laplace` -- expansion along the last row,
  ``Pf(M) = sum_j (-1)^j M[n][j] Pf(M with rows/cols n, j removed)``;
* :func:`pf_matchings` -- signed sum over perfect matchings (oracle);
* :func:`pf_structured` -- the same last-row expansion specialised to the
  template shape, where the bottom ``d-1`` rows only reach the first
  ``d+1`` columns, memoised on the set of consumed columns.

Indices are 1-based throughout, matching the usual matrix notation.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from typing import NamedTuple

from .coeffring import ZZ
from .errors import (
    DegreeMismatch,
    IndexOutOfRange,
    MismatchedRing,
    OddSize,
    SizeGuardExceeded,
    StructureViolation,
)
from .sympoly import SYMBOLIC, TriPoly

ORACLE_SIZE_GUARD = 12

_X, _Y, _Z = (1, 0, 0), (0, 1, 0), (0, 0, 1)


class LinearForm(NamedTuple):
    """Raw coefficients of ``a*x + b*y + c*z``."""

    a: object
    b: object
    c: object

    def to_poly(self, domain) -> TriPoly:
        return TriPoly.linear(self.a, self.b, self.c, domain)

    @classmethod
    def of(cls, p: TriPoly) -> "LinearForm":
        z = p.domain.zero
        return cls(p.coeffs.get(_X, z), p.coeffs.get(_Y, z), p.coeffs.get(_Z, z))


class SkewMatrix:
    """Skew-symmetric matrix stored as its strict upper triangle.

    ``upper`` maps ``(row, col)`` with ``row < col`` to a nonzero degree-1
    :class:`TriPoly`; the lower triangle is derived on lookup, so skewness
    holds by construction.
    """

    __slots__ = ("size", "domain", "upper")

    def __init__(self, size: int, upper: dict | None = None, domain=SYMBOLIC):
        self.size = size
        self.domain = domain
        self.upper = {}
        for (i, j), p in (upper or {}).items():
            if not (1 <= i <= size and 1 <= j <= size):
                raise IndexOutOfRange(f"entry ({i},{j}) outside a {size}x{size} matrix")
            if i == j:
                raise ValueError("the diagonal of a skew matrix is zero")
            if isinstance(p, LinearForm):
                p = p.to_poly(domain)
            if p.domain != domain:
                raise MismatchedRing(f"{p.domain} entry in a {domain} matrix")
            if p.coeffs and p.degree != 1:
                raise DegreeMismatch(f"entry ({i},{j}) is not a linear form")
            if i > j:
                i, j, p = j, i, -p
            if p.coeffs:
                self.upper[(i, j)] = p

    @classmethod
    def _make(cls, size: int, upper: dict, domain) -> "SkewMatrix":
        obj = cls.__new__(cls)
        obj.size = size
        obj.upper = upper
        obj.domain = domain
        return obj

    def entry(self, i: int, j: int) -> TriPoly:
        if i < j:
            p = self.upper.get((i, j))
            return p if p is not None else TriPoly.zero(1, self.domain)
        if i > j:
            p = self.upper.get((j, i))
            return -p if p is not None else TriPoly.zero(1, self.domain)
        return TriPoly.zero(1, self.domain)

    def form(self, i: int, j: int) -> LinearForm:
        return LinearForm.of(self.entry(i, j))

    def __eq__(self, other):
        if not isinstance(other, SkewMatrix):
            return NotImplemented
        return self.size == other.size and self.domain == other.domain and self.upper == other.upper

    def minor(self, p: int, q: int) -> "SkewMatrix":
        return minor(self, (p, q))

    def swap(self, p: int, q: int) -> "SkewMatrix":
        """Swap rows p, q and columns p, q simultaneously."""
        perm = {p: q, q: p}
        upper = {}
        for (i, j), v in self.upper.items():
            i2, j2 = perm.get(i, i), perm.get(j, j)
            if i2 < j2:
                upper[(i2, j2)] = v
            else:
                upper[(j2, i2)] = -v
        return SkewMatrix._make(self.size, upper, self.domain)

    def map_coeffs(self, fn, domain) -> "SkewMatrix":
        upper = {}
        for key, p in self.upper.items():
            p = p.map_coeffs(fn, domain)
            if p.coeffs:
                upper[key] = p
        return SkewMatrix._make(self.size, upper, domain)

    def to_json(self) -> dict:
        enc = self.domain.encode
        entries = []
        for (i, j) in sorted(self.upper):
            a, b, c = self.form(i, j)
            entries.append({"row": i, "col": j, "a": enc(a), "b": enc(b), "c": enc(c)})
        return {"size": self.size, "entries": entries}

    @classmethod
    def from_json(cls, obj: dict, domain) -> "SkewMatrix":
        dec = domain.decode
        upper = {}
        for e in obj["entries"]:
            i, j = int(e["row"]), int(e["col"])
            if not i < j:
                raise ValueError(f"serialized entry ({i},{j}) is not strictly upper")
            upper[(i, j)] = LinearForm(dec(e["a"]), dec(e["b"]), dec(e["c"]))
        return cls(int(obj["size"]), upper, domain)

    def to_latex(self) -> str:
        rows = []
        for i in range(1, self.size + 1):
            cells = []
            for j in range(1, self.size + 1):
                p = self.entry(i, j)
                cells.append(_latex_poly(p))
            rows.append(" & ".join(cells))
        return "\\begin{pmatrix}\n" + " \\\\\n".join(rows) + "\n\\end{pmatrix}"

    def __repr__(self):
        return f"SkewMatrix(size={self.size}, entries={len(self.upper)}, domain={self.domain})"


def _latex_poly(p: TriPoly) -> str:
    text = str(p)
    for old, new in (("Theta", "\\Theta"), ("*", " ")):
        text = text.replace(old, new)
    return text


def minor(M: SkewMatrix, rows) -> SkewMatrix:
    """Delete rows and columns ``p`` and ``q``; later indices shift down."""
    p, q = rows
    if p == q:
        raise IndexOutOfRange(f"minor needs two distinct indices, got {p} twice")
    for r in (p, q):
        if not 1 <= r <= M.size:
            raise IndexOutOfRange(f"index {r} outside 1..{M.size}")
    lo, hi = min(p, q), max(p, q)

    def shift(i):
        return i - (i > lo) - (i > hi)

    upper = {
        (shift(i), shift(j)): v
        for (i, j), v in M.upper.items()
        if i not in (lo, hi) and j not in (lo, hi)
    }
    return SkewMatrix._make(M.size - 2, upper, M.domain)


def _check_even(M: SkewMatrix):
    if M.size % 2:
        raise OddSize(f"Pfaffian of an odd-size ({M.size}) matrix")


def pf_laplace(M: SkewMatrix) -> TriPoly:
    """Pfaffian by recursive expansion along the last row.

    Sub-Pfaffians are memoised on the tuple of surviving indices; zero
    entries of the expansion row are skipped.
    """
    _check_even(M)
    memo: dict = {}
    one = TriPoly.one(M.domain)
    # nonzero entries of each row, restricted to columns left of the row
    left_of = {i: [] for i in range(1, M.size + 1)}
    for (i, j), v in sorted(M.upper.items()):
        left_of[j].append((i, -v))

    def pf(idx: tuple) -> TriPoly:
        if not idx:
            return one
        if len(idx) == 2:
            return M.entry(idx[0], idx[1])
        hit = memo.get(idx)
        if hit is not None:
            return hit
        last = idx[-1]
        total = TriPoly.zero(len(idx) // 2, M.domain)
        for j, e in left_of[last]:
            pos = bisect_left(idx, j)
            if pos == len(idx) or idx[pos] != j:
                continue
            pos += 1  # 1-based position of j among the surviving indices
            term = e * pf(idx[: pos - 1] + idx[pos:-1])
            total = total - term if pos % 2 else total + term
        memo[idx] = total
        return total

    return pf(tuple(range(1, M.size + 1)))


def misindexed_laplace(M: SkewMatrix) -> TriPoly:
    """Last-row recursion with ``m_{1j}`` substituted for ``m_{2d,j}``.

    Kept only to document why that indexing is wrong: it telescopes to
    zero already on the generic 4x4 matrix."""
    _check_even(M)
    if M.size == 0:
        return TriPoly.one(M.domain)
    if M.size == 2:
        return M.entry(1, 2)
    n = M.size
    total = TriPoly.zero(n // 2, M.domain)
    for j in range(1, n):
        e = M.entry(1, j)
        if not e.coeffs:
            continue
        term = e * misindexed_laplace(minor(M, (n, j)))
        total = total - term if j % 2 else total + term
    return total


def pf_matchings(M: SkewMatrix, size_guard: int = ORACLE_SIZE_GUARD) -> TriPoly:
    """Signed sum over perfect matchings.

    Each matching {(i1<j1), ..., (in<jn)} contributes the sign of the
    permutation (i1 j1 ... in jn) times the product of its entries.  The
    enumeration always pairs the smallest free index first, so the sign is
    accumulated incrementally: pairing it with the free index at (0-based)
    position p among the remaining ones contributes (-1)^(p-1).
    """
    _check_even(M)
    if M.size > size_guard:
        raise SizeGuardExceeded(f"matching oracle limited to size {size_guard}, got {M.size}")
    n = M.size // 2
    # Inner loop works on raw dicts keyed by packed exponents i*S^2 + j*S + k,
    # so a monomial product is one integer addition; normalise once at the end.
    S = n + 1
    factors = {
        key: [(i * S * S + j * S + k, c) for (i, j, k), c in p.coeffs.items()]
        for key, p in M.upper.items()
    }
    acc: dict = {}

    def walk(free: tuple, sign: int, partial: dict):
        if not free:
            if sign > 0:
                for m, c in partial.items():
                    acc[m] = acc[m] + c if m in acc else c
            else:
                for m, c in partial.items():
                    acc[m] = acc[m] - c if m in acc else -c
            return
        i = free[0]
        for p in range(1, len(free)):
            f = factors.get((i, free[p]))
            if f is None:
                continue
            prod: dict = {}
            for m2, c2 in f:
                for m1, c1 in partial.items():
                    m = m1 + m2
                    prod[m] = prod[m] + c1 * c2 if m in prod else c1 * c2
            walk(free[1:p] + free[p + 1 :], sign if p % 2 else -sign, prod)

    walk(tuple(range(1, M.size + 1)), 1, {0: M.domain.one})
    norm = M.domain.norm
    out = {}
    for m, c in acc.items():
        c = norm(c)
        if c:
            out[(m // (S * S), m // S % S, m % S)] = c
    return TriPoly._make(n, out, M.domain)


def matching_sign(pairs) -> int:
    """Sign of the permutation obtained by flattening ``pairs``."""
    seq = [v for pair in pairs for v in pair]
    inversions = sum(1 for a in range(len(seq)) for b in range(a + 1, len(seq)) if seq[a] > seq[b])
    return -1 if inversions % 2 else 1


def _has_symbols(p: TriPoly) -> bool:
    if p.domain is not SYMBOLIC:
        return False
    return any(not c.is_constant() for c in p.coeffs.values())


def pf_structured(M, degree: int | None = None) -> TriPoly:
    """Pfaffian of a template-shaped matrix.

    ``M`` is a :class:`SkewMatrix` of size 2d (or anything with ``matrix``
    and ``degree`` attributes, e.g. a template).  Rows d+2..2d must vanish
    among themselves.  Expanding along the current last row repeatedly only
    ever picks an entry in one of the first d+1 columns, so a sub-Pfaffian is
    determined by the set of those columns already consumed; that set (as a
    bitmask) is the memo key.  Each step multiplies a sub-Pfaffian by one
    entry from the bottom rows; if both factors carry symbols the product
    would be nonlinear in the unknowns and StructureViolation is raised.
    """
    if hasattr(M, "matrix"):
        degree = M.degree
        M = M.matrix
    _check_even(M)
    d = M.size // 2 if degree is None else degree
    if M.size != 2 * d:
        raise DegreeMismatch(f"matrix size {M.size} does not match degree {d}")
    for (i, j) in M.upper:
        if i >= d + 2:
            raise StructureViolation(
                f"entry ({i},{j}) lies in the block that must be zero for the structured expansion"
            )
    left = d + 1
    domain = M.domain
    memo: dict = {}
    # The bottom rows, pre-negated into lower-triangle orientation.
    bottom = {
        r: [(c, -M.upper[(c, r)]) for c in range(1, left + 1) if (c, r) in M.upper]
        for r in range(left + 1, 2 * d + 1)
    }

    def pf(mask: int, depth: int) -> TriPoly:
        if depth == d - 1:
            p, q = (c for c in range(1, left + 1) if not mask >> (c - 1) & 1)
            return M.entry(p, q)
        hit = memo.get(mask)
        if hit is not None:
            return hit
        row = 2 * d - depth
        total = TriPoly.zero(d - depth, domain)
        for c, e in bottom[row]:
            if mask >> (c - 1) & 1:
                continue
            # 1-based position of column c among the surviving indices
            pos = 1 + sum(1 for c2 in range(1, c) if not mask >> (c2 - 1) & 1)
            sub = pf(mask | 1 << (c - 1), depth + 1)
            if not sub.coeffs:
                continue
            if _has_symbols(e) and _has_symbols(sub):
                raise StructureViolation(
                    f"row {row}, column {c}: product of two symbol-bearing factors"
                )
            term = e * sub
            total = total - term if pos % 2 else total + term
        memo[mask] = total
        return total

    if d == 1:
        return M.entry(1, 2)
    return pf(0, 0)


def _int_bareiss_det(rows: list) -> int:
    """Fraction-free Gaussian elimination on an integer matrix."""
    n = len(rows)
    if n == 0:
        return 1
    a = [list(r) for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    return sign * a[n - 1][n - 1]


def int_det(X) -> int:
    """Exact determinant of a square integer matrix (list of rows)."""
    n = len(X)
    if any(len(r) != n for r in X):
        raise ValueError("determinant of a non-square matrix")
    return _int_bareiss_det(X)


def det(M: SkewMatrix, size_guard: int = ORACLE_SIZE_GUARD, method: str = "auto") -> TriPoly:
    """Exact determinant as a homogeneous polynomial of degree ``M.size``.

    Over ZZ (``method="kronecker"``) the entries are mapped to integers by
    the Kronecker substitution z=1, x=B, y=B^(n+1) with B a power of two
    larger than twice the Hadamard-style coefficient bound; the integer
    determinant is computed fraction-free and decoded digit by digit in
    balanced base B.  Every other domain (``method="cofactor"``) uses
    Laplace expansion along rows memoised on the set of used columns.
    """
    if M.size > size_guard:
        raise SizeGuardExceeded(f"determinant limited to size {size_guard}, got {M.size}")
    if method == "auto":
        method = "kronecker" if M.domain == ZZ else "cofactor"
    if method == "kronecker":
        if M.domain != ZZ:
            raise MismatchedRing("Kronecker determinant needs integer coefficients")
        return _det_kronecker(M)
    return _det_cofactor(M)


def _det_cofactor(M: SkewMatrix) -> TriPoly:
    n = M.size
    memo: dict = {}
    one = TriPoly.one(M.domain)

    def go(row: int, used: int) -> TriPoly:
        if row > n:
            return one
        hit = memo.get(used)
        if hit is not None:
            return hit
        total = TriPoly.zero(n - row + 1, M.domain)
        pos = 0
        for col in range(1, n + 1):
            if used >> col & 1:
                continue
            e = M.entry(row, col)
            if e.coeffs:
                term = e * go(row + 1, used | 1 << col)
                total = total - term if pos % 2 else total + term
            pos += 1
        memo[used] = total
        return total

    return go(1, 0)


def _det_kronecker(M: SkewMatrix) -> TriPoly:
    n = M.size
    if n == 0:
        return TriPoly.one(ZZ)
    L = max((sum(abs(v) for v in LinearForm.of(p)) for p in M.upper.values()), default=0)
    if L == 0:
        return TriPoly.zero(n, ZZ)
    bound = math.factorial(n) * L**n
    bits = (2 * bound + 1).bit_length() + 1
    base = 1 << bits
    ystep = base ** (n + 1)
    rows = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a, b, c = M.form(i, j)
            row.append(a * base + b * ystep + c)
        rows.append(row)
    value = _int_bareiss_det(rows)
    coeffs = {}
    half = base >> 1
    for j in range(n + 1):
        for i in range(n + 1):
            digit = value & (base - 1)
            if digit >= half:
                digit -= base
            value = (value - digit) >> bits
            if digit:
                if i + j > n:
                    raise ArithmeticError("Kronecker decoding produced a term beyond degree n")
                coeffs[(i, j, n - i - j)] = digit
    if value:
        raise ArithmeticError("Kronecker decoding left a nonzero remainder")
    return TriPoly._make(n, coeffs, ZZ)


def congruence(M: SkewMatrix, X) -> SkewMatrix:
    """Return X M X^T for a square integer matrix ``X`` (list of rows)."""
    n = M.size
    if len(X) != n or any(len(r) != n for r in X):
        raise DegreeMismatch(f"congruence needs a {n}x{n} integer matrix")
    # Y = M X^T, column by column: Y[k][j] = sum_l M[k][l] X[j][l]
    full = {}
    for (k, l), v in M.upper.items():
        full[(k, l)] = v
        full[(l, k)] = -v
    zero = TriPoly.zero(1, M.domain)
    upper = {}
    for i in range(n):
        xi = X[i]
        for j in range(i + 1, n):
            xj = X[j]
            acc = zero
            for (k, l), v in full.items():
                s = xi[k - 1] * xj[l - 1]
                if s:
                    acc = acc + v.scale(s)
            if acc.coeffs:
                upper[(i + 1, j + 1)] = acc
    return SkewMatrix._make(n, upper, M.domain)
