"""End-to-end: concrete f over a ring -> verified skew matrix with Pf = f.

The per-degree integer solution is computed once (and cached on disk); a
representation of a particular f is then just the image of that solution
under Z -> R evaluated at f's coefficients.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .coeffring import ZZ, ModularRing, RationalField, Ring, parse_ring
from .errors import (
    CorruptCache,
    DegreeMismatch,
    InternalInvariantError,
    LinearityViolation,
    NotSolvableOverZ,
    PfaffrepError,
    PurePowerViolation,
    UsageError,
    VerificationFailed,
)
from .linsolve import ParametricSolution, extract_system, solve_parametric, verify_solution
from .pfaffian import SkewMatrix, pf_laplace
from .sympoly import Monomial3, TriPoly, monomials
from .template import DEGREE_CAP, build_template, check_degree, counts

log = logging.getLogger(__name__)

FORMAT_VERSION = 1


@dataclass
class Representation:
    """Pf(matrix) = f; the x-, y-, z-coefficient matrices of the entries are
    the three skew matrices A0, A1, A2."""

    degree: int
    ring: Ring
    matrix: SkewMatrix
    free_values: list
    provenance: str
    verified: bool = False

    def coefficient_matrices(self) -> tuple:
        n = self.matrix.size
        mats = tuple([[self.ring.zero] * n for _ in range(n)] for _ in range(3))
        for (i, j), p in self.matrix.upper.items():
            for axis, m in enumerate(((1, 0, 0), (0, 1, 0), (0, 0, 1))):
                v = p.coeffs.get(m, self.ring.zero)
                mats[axis][i - 1][j - 1] = v
                mats[axis][j - 1][i - 1] = self.ring.norm(-v)
        return mats

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "ring": self.ring.descriptor,
            "matrix": self.matrix.to_json(),
            "free_values": [self.ring.encode(v) for v in self.free_values],
            "provenance": self.provenance,
            "pfaffian_check": "passed" if self.verified else "skipped",
        }

    @classmethod
    def from_json(cls, obj) -> "Representation":
        if isinstance(obj, str):
            obj = json.loads(obj)
        ring = parse_ring(obj["ring"])
        return cls(
            int(obj["degree"]),
            ring,
            SkewMatrix.from_json(obj["matrix"], ring),
            [ring.decode(v) for v in obj.get("free_values", [])],
            obj.get("provenance", ""),
            obj.get("pfaffian_check") == "passed",
        )


@dataclass
class Verdict:
    ok: bool
    witness: Monomial3 | None = None
    expected: object = None
    got: object = None

    def __bool__(self):
        return self.ok


# -- solution cache ---------------------------------------------------------


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


class SolutionCache:
    """Directory of ``solution_dNN.json`` files, each with a content checksum."""

    def __init__(self, directory):
        self.directory = Path(directory)

    def path(self, d: int) -> Path:
        return self.directory / f"solution_d{d:02d}.json"

    def store(self, sol: ParametricSolution) -> Path:
        self.directory.mkdir(parents=True, exist_ok=True)
        payload = sol.to_json()
        doc = {"format_version": FORMAT_VERSION, "checksum": _checksum(payload), "solution": payload}
        target = self.path(sol.degree)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=target.name, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as fh:
                json.dump(doc, fh, sort_keys=True)
            os.replace(tmp, target)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return target

    def load(self, d: int) -> ParametricSolution | None:
        """Return the cached solution, None if absent.

        Raises CorruptCache if the file is unreadable, fails its checksum, or
        does not solve a freshly extracted system.
        """
        path = self.path(d)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text())
            payload = doc["solution"]
            if doc.get("checksum") != _checksum(payload):
                raise CorruptCache(f"{path}: checksum mismatch")
            sol = ParametricSolution.from_json(payload)
        except CorruptCache:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise CorruptCache(f"{path}: {exc}") from exc
        if sol.degree != d or not verify_solution(extract_system(build_template(d, allow_unverified=True)), sol):
            raise CorruptCache(f"{path}: cached solution does not solve the degree-{d} system")
        return sol


def cache_store(sol: ParametricSolution, directory) -> Path:
    return SolutionCache(directory).store(sol)


def cache_load(d: int, directory) -> ParametricSolution | None:
    return SolutionCache(directory).load(d)


def default_cache_dir() -> Path:
    return Path(os.environ.get("PFAFFREP_CACHE", "cache"))


def get_solution(d: int, cache: SolutionCache | None = None, allow_unverified: bool = False) -> ParametricSolution:
    """Cached solution for degree d, recomputing on a miss or a corrupt file."""
    check_degree(d, DEGREE_CAP, allow_unverified)
    if cache is not None:
        try:
            sol = cache.load(d)
        except CorruptCache as exc:
            log.warning("discarding cache entry: %s", exc)
            sol = None
        if sol is not None:
            return sol
    sol = solve_parametric(extract_system(build_template(d, allow_unverified=allow_unverified)))
    if cache is not None:
        cache.store(sol)
    return sol


# -- building and verifying -------------------------------------------------


def instantiate(d: int, ring: Ring, theta_values: dict, sol: ParametricSolution, free_values: list,
                allow_unverified: bool = False) -> SkewMatrix:
    """Template with Theta symbols set to ``theta_values`` (exponent triple ->
    raw ring value) and unknowns set through the integer solution."""
    T = build_template(d, allow_unverified=allow_unverified)
    th = [theta_values.get(tuple(s.idx), ring.zero) for s in T.theta_symbols]
    t = [ring.norm(v) for v in free_values]
    values = {s: v for s, v in zip(T.theta_symbols, th)}
    norm, coerce = ring.norm, ring.coerce_int
    for s, prow, nrow in zip(T.unknown_symbols, sol.particular, sol.nullspace):
        acc = ring.zero
        for p, v in zip(prow, th):
            if p:
                acc = norm(acc + coerce(p) * v)
        for nv, v in zip(nrow, t):
            if nv:
                acc = norm(acc + coerce(nv) * v)
        values[s] = acc
    return T.matrix.map_coeffs(lambda c: c.evaluate(values, ring), ring)


def build_representation(d: int, f: TriPoly, free_values: list | None = None, *,
                         solution: ParametricSolution | None = None,
                         cache: SolutionCache | None = None,
                         verify: bool = True,
                         allow_unverified: bool = False) -> Representation:
    check_degree(d, DEGREE_CAP, allow_unverified)
    if f.degree != d and f.coeffs:
        raise DegreeMismatch(f"polynomial has degree {f.degree}, requested degree {d}")
    ring = f.domain
    if not isinstance(ring, Ring):
        raise UsageError("build_representation needs a polynomial over a concrete ring")
    sol = solution if solution is not None else get_solution(d, cache, allow_unverified)
    if sol.degree != d:
        raise DegreeMismatch(f"solution is for degree {sol.degree}, not {d}")
    k = sol.free_count
    if free_values is None:
        free_values = [ring.zero] * k
    free_values = [ring.coerce_int(v) if isinstance(v, int) else ring.norm(v) for v in free_values]
    if len(free_values) != k:
        raise UsageError(f"degree {d} has {k} free parameters, got {len(free_values)} values")
    matrix = instantiate(d, ring, dict(f.coeffs), sol, free_values, allow_unverified)
    rep = Representation(d, ring, matrix, free_values, f"solution_d{d:02d}:{_checksum(sol.to_json())[:16]}")
    if verify:
        verdict = verify_representation(rep, f)
        if not verdict:
            raise VerificationFailed(
                f"Pf(M) != f at monomial {tuple(verdict.witness)} "
                f"(expected {verdict.expected}, got {verdict.got}); matrix: {json.dumps(matrix.to_json())}"
            )
        rep.verified = True
    return rep


def verify_representation(rep: Representation, f: TriPoly) -> Verdict:
    """Recompute Pf(matrix) by last-row expansion and compare with f."""
    if rep.matrix.domain != f.domain:
        return Verdict(False, None, f.domain, rep.matrix.domain)
    if rep.matrix.size != 2 * f.degree:
        return Verdict(False, None, 2 * f.degree, rep.matrix.size)
    pf = pf_laplace(rep.matrix)
    for m in monomials(f.degree):
        want = f.coeffs.get(tuple(m), f.domain.zero)
        got = pf.coeffs.get(tuple(m), f.domain.zero)
        if want != got:
            return Verdict(False, m, want, got)
    return Verdict(True)


def reduce_representation(rep: Representation, ring: ModularRing) -> Representation:
    """Image of an integer representation under Z -> Z/n."""
    if rep.ring != ZZ:
        raise UsageError("only integer representations can be reduced")
    return Representation(rep.degree, ring, rep.matrix.map_coeffs(ring.norm, ring),
                          [ring.norm(v) for v in rep.free_values], rep.provenance)


def random_form(d: int, ring: Ring, rng: random.Random, bound: int = 9) -> TriPoly:
    coeffs = {}
    for m in monomials(d):
        if isinstance(ring, RationalField):
            v = ring.norm(ring.coerce_int(rng.randint(-bound, bound)) / rng.randint(1, bound))
        else:
            v = ring.coerce_int(rng.randint(-bound, bound))
        coeffs[tuple(m)] = v
    return TriPoly(d, coeffs, ring)


def random_free_values(sol: ParametricSolution, ring: Ring, rng: random.Random, bound: int = 9) -> list:
    return [ring.coerce_int(rng.randint(-bound, bound)) for _ in range(sol.free_count)]


# -- sweep ------------------------------------------------------------------


@dataclass
class DegreeReport:
    degree: int
    counts: dict
    rank: int | None = None
    free_count: int | None = None
    solvable_over_Z: bool = False
    linearity_ok: bool = False
    pure_powers_ok: bool = False
    verify_samples_passed: int = 0
    verify_samples_total: int = 0
    wall_time: float = 0.0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (
            self.solvable_over_Z
            and self.linearity_ok
            and self.pure_powers_ok
            and self.verify_samples_passed == self.verify_samples_total
            and not self.failures
        )


@dataclass
class SweepReport:
    rows: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_json(self, timings: bool = False) -> dict:
        """Wall times are left out unless asked for, so identical runs
        serialise identically."""
        rows = [
            {
                "degree": r.degree,
                "counts": r.counts,
                "rank": r.rank,
                "free_count": r.free_count,
                "solvable_over_Z": r.solvable_over_Z,
                "linearity_ok": r.linearity_ok,
                "pure_powers_ok": r.pure_powers_ok,
                "verify_samples_passed": r.verify_samples_passed,
                "verify_samples_total": r.verify_samples_total,
                "failures": r.failures,
            }
            for r in self.rows
        ]
        if timings:
            for row, r in zip(rows, self.rows):
                row["wall_time"] = round(r.wall_time, 3)
        return {"format_version": FORMAT_VERSION, "all_passed": self.ok, "degrees": rows}

    def table(self) -> str:
        head = f"{'d':>3} {'size':>4} {'unk':>4} {'eqs':>4} {'rank':>4} {'free':>4} {'Z-solv':>6} {'linear':>6} {'pure':>5} {'verified':>9} {'time/s':>8}"
        lines = [head, "-" * len(head)]
        for r in self.rows:
            yn = lambda b: "yes" if b else "NO"  # noqa: E731
            lines.append(
                f"{r.degree:>3} {r.counts['matrix_size']:>4} {r.counts['unknowns']:>4} {r.counts['equations']:>4} "
                f"{r.rank if r.rank is not None else '-':>4} {r.free_count if r.free_count is not None else '-':>4} "
                f"{yn(r.solvable_over_Z):>6} {yn(r.linearity_ok):>6} {yn(r.pure_powers_ok):>5} "
                f"{r.verify_samples_passed:>4}/{r.verify_samples_total:<4} {r.wall_time:>8.2f}"
            )
            for msg in r.failures:
                lines.append(f"    failure: {msg}")
        return "\n".join(lines) + "\n"


def check_degree_run(d: int, samples: int, rings: list, seed: int = 0,
                     cache_dir: str | None = None, allow_unverified: bool = False) -> DegreeReport:
    """One row of the sweep.  Never raises for mathematical failures; they
    are recorded in the report."""
    start = time.perf_counter()
    rep = DegreeReport(d, counts(d))
    rings = [parse_ring(r) if isinstance(r, str) else r for r in rings]
    try:
        T = build_template(d, allow_unverified=allow_unverified)
        system = extract_system(T)  # raises on a linearity / pure-power failure
        rep.linearity_ok = rep.pure_powers_ok = True
        sol = solve_parametric(system)
        rep.rank, rep.free_count = sol.rank, sol.free_count
        rep.solvable_over_Z = bool(sol.certificate["solvable_over_Z"])
        if cache_dir is not None:
            SolutionCache(cache_dir).store(sol)
    except LinearityViolation as exc:
        rep.failures.append(f"linearity: {exc}")
    except PurePowerViolation as exc:
        rep.linearity_ok = True
        rep.failures.append(f"pure powers: {exc}")
    except NotSolvableOverZ as exc:
        rep.linearity_ok = rep.pure_powers_ok = True
        rep.failures.append(f"not solvable over Z: {exc}")
    except PfaffrepError as exc:
        rep.failures.append(f"{type(exc).__name__}: {exc}")
    if rep.solvable_over_Z:
        rng = random.Random(f"{seed}:{d}")
        for ring in rings:
            for _ in range(samples):
                f = random_form(d, ring, rng)
                free = random_free_values(sol, ring, rng)
                rep.verify_samples_total += 1
                try:
                    build_representation(d, f, free, solution=sol, allow_unverified=allow_unverified)
                    rep.verify_samples_passed += 1
                except (VerificationFailed, InternalInvariantError) as exc:
                    rep.failures.append(f"{ring}: {str(exc)[:300]}")
    rep.wall_time = time.perf_counter() - start
    return rep


def sweep(d_from: int, d_to: int, samples_per_degree: int = 1, rings=("int",), *, seed: int = 0,
          cache_dir: str | None = None, jobs: int = 1, allow_unverified: bool = False) -> SweepReport:
    check_degree(d_from, DEGREE_CAP, allow_unverified)
    check_degree(d_to, DEGREE_CAP, allow_unverified)
    if d_from > d_to:
        raise UsageError(f"empty degree range {d_from}..{d_to}")
    rings = [r.descriptor if isinstance(r, Ring) else r for r in rings]
    degrees = list(range(d_from, d_to + 1))
    args = [(d, samples_per_degree, rings, seed, cache_dir, allow_unverified) for d in degrees]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_star, args))
    else:
        rows = [check_degree_run(*a) for a in args]
    return SweepReport(rows)


def _run_star(a):
    return check_degree_run(*a)
