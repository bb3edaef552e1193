"""Exact integer matrix normal forms.

Matrices are plain lists of rows of Python ints.  Internally the Hermite
reduction works on sparse columns ({row: value} dicts) because the systems
coming out of the template are very sparse.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class HermiteResult:
    """Column-style Hermite form: ``A @ U == [H | 0]``.

    ``H`` is m x rank.  Column j of H is zero above row ``pivot_rows[j]``,
    its pivot there is positive, and every entry left of a pivot in the
    pivot's row lies in ``[0, pivot)``.
    """

    H: list
    U: list
    rank: int
    pivot_rows: list
    log: list = field(default_factory=list, repr=False)


@dataclass
class SmithResult:
    shape: tuple
    invariant_factors: list  # the nonzero diagonal entries, each dividing the next

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)

    @property
    def S(self) -> list:
        m, n = self.shape
        out = [[0] * n for _ in range(m)]
        for i, s in enumerate(self.invariant_factors):
            out[i][i] = s
        return out


def shape(A) -> tuple:
    return (len(A), len(A[0]) if A else 0)


def _columns(A, ncols):
    cols = [{} for _ in range(ncols)]
    for i, row in enumerate(A):
        for j, v in enumerate(row):
            if v:
                cols[j][i] = v
    return cols


def _axpy(dst: dict, q: int, src: dict):
    """dst -= q * src, dropping zeros."""
    for r, v in src.items():
        w = dst.get(r, 0) - q * v
        if w:
            dst[r] = w
        else:
            dst.pop(r, None)


def hnf(A, ncols: int | None = None, keep_log: bool = False) -> HermiteResult:
    """Hermite normal form by unimodular column operations, with transform.

    Rows are processed top to bottom.  In each row the active columns are
    combined Euclid-style (always reducing by the entry of smallest absolute
    value, ties broken towards the sparsest column) until a single nonzero
    remains; it becomes the next pivot, is made positive, and the earlier
    pivot columns are reduced modulo it.  If ``keep_log`` is set, every
    elementary operation is recorded as ``("swap", i, j)``, ``("neg", i)``
    or ``("add", dst, q, src)`` meaning ``col[dst] -= q * col[src]``.
    """
    m = len(A)
    n = len(A[0]) if A else (ncols or 0)
    acols = _columns(A, n)
    ucols = [{j: 1} for j in range(n)]
    log = [] if keep_log else None
    pivot_rows: list = []
    k = 0

    def colop(dst, q, src):
        _axpy(acols[dst], q, acols[src])
        _axpy(ucols[dst], q, ucols[src])
        if log is not None:
            log.append(("add", dst, q, src))

    def swap(i, j):
        if i != j:
            acols[i], acols[j] = acols[j], acols[i]
            ucols[i], ucols[j] = ucols[j], ucols[i]
            if log is not None:
                log.append(("swap", i, j))

    for row in range(m):
        if k == n:
            break
        while True:
            active = [j for j in range(k, n) if row in acols[j]]
            if len(active) <= 1:
                break
            piv = min(active, key=lambda j: (abs(acols[j][row]), len(acols[j]) + len(ucols[j]), j))
            pv = acols[piv][row]
            for j in active:
                if j != piv:
                    colop(j, acols[j][row] // pv, piv)
        if not active:
            continue
        swap(k, active[0])
        if acols[k][row] < 0:
            acols[k] = {r: -v for r, v in acols[k].items()}
            ucols[k] = {r: -v for r, v in ucols[k].items()}
            if log is not None:
                log.append(("neg", k))
        pv = acols[k][row]
        for j in range(k):
            v = acols[j].get(row, 0)
            q = v // pv
            if q:
                colop(j, q, k)
        pivot_rows.append(row)
        k += 1

    H = [[acols[j].get(i, 0) for j in range(k)] for i in range(m)]
    U = [[ucols[j].get(i, 0) for j in range(n)] for i in range(n)]
    return HermiteResult(H, U, k, pivot_rows, log or [])


def replay_log(log, n: int) -> tuple:
    """Rebuild U (and det U = +-1) from the operation log of :func:`hnf`.

    Every operation has determinant +-1, so the product is unimodular by
    construction; this is how very wide transforms are certified.
    """
    cols = [{j: 1} for j in range(n)]
    det_sign = 1
    for op in log:
        if op[0] == "swap":
            _, i, j = op
            cols[i], cols[j] = cols[j], cols[i]
            det_sign = -det_sign
        elif op[0] == "neg":
            cols[op[1]] = {r: -v for r, v in cols[op[1]].items()}
            det_sign = -det_sign
        else:
            _, dst, q, src = op
            if dst == src:
                raise ValueError("column operation with dst == src is not elementary")
            _axpy(cols[dst], q, cols[src])
    return [[cols[j].get(i, 0) for j in range(n)] for i in range(n)], det_sign


def snf(A) -> SmithResult:
    """Invariant factors of an integer matrix (Smith form without transforms)."""
    m, n = shape(A)
    rows = [{j: v for j, v in enumerate(r) if v} for r in A]
    rows = [r for r in rows if r]
    factors = []
    while rows:
        # pivot: smallest absolute value anywhere in the remaining matrix
        pi, pj, pv = None, None, None
        for i, r in enumerate(rows):
            for j, v in r.items():
                if pv is None or abs(v) < abs(pv):
                    pi, pj, pv = i, j, v
                    if abs(v) == 1:
                        break
            if pv is not None and abs(pv) == 1:
                break
        prow = rows[pi]
        # clear the pivot column from the other rows and the pivot row itself
        dirty = False
        for i, r in enumerate(rows):
            if i != pi and pj in r:
                q = r[pj] // pv
                _axpy(r, q, prow)
                if r.get(pj):
                    dirty = True
        for j, v in list(prow.items()):
            if j != pj:
                q = v // pv
                if q:
                    for r in rows:
                        if pj in r:
                            w = r.get(j, 0) - q * r[pj]
                            if w:
                                r[j] = w
                            else:
                                r.pop(j, None)
                if prow.get(j):
                    dirty = True
        if dirty:
            rows = [r for r in rows if r]
            continue
        # pivot is now alone in its row and column; enforce divisibility
        bad = next((r for i, r in enumerate(rows) if i != pi and any(v % pv for v in r.values())), None)
        if bad is not None:
            for j, v in bad.items():
                prow[j] = prow.get(j, 0) + v
            continue
        factors.append(abs(pv))
        rows = [r for i, r in enumerate(rows) if i != pi and r]
        for r in rows:
            r.pop(pj, None)
        rows = [r for r in rows if r]
    factors.sort()
    return SmithResult((m, n), factors)


def matmul(A, B) -> list:
    """Exact product of two integer matrices, skipping zero entries."""
    if not A:
        return []
    inner = len(B)
    ncols = len(B[0]) if B else 0
    if len(A[0]) != inner:
        raise ValueError(f"shape mismatch: {shape(A)} @ {shape(B)}")
    brows = [[(j, v) for j, v in enumerate(r) if v] for r in B]
    out = []
    for row in A:
        acc = [0] * ncols
        for k, a in enumerate(row):
            if a:
                for j, b in brows[k]:
                    acc[j] += a * b
        out.append(acc)
    return out


def to_sparse(A) -> dict:
    m, n = shape(A)
    return {
        "shape": [m, n],
        "entries": [[i, j, v] for i, row in enumerate(A) for j, v in enumerate(row) if v],
    }


def from_sparse(obj) -> list:
    m, n = obj["shape"]
    out = [[0] * n for _ in range(m)]
    for i, j, v in obj["entries"]:
        out[i][j] = int(v)
    return out
