"""Command-line interface: ``pfaffrep {template,solve,build,verify,sweep}``.

Exit codes: 0 success, 1 verification false or negative certificate,
2 usage error, 3 internal invariant failure.  Machine output goes to stdout,
everything else to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from .coeffring import parse_ring
from .errors import InternalInvariantError, NotSolvableOverZ, PfaffrepError, UsageError
from .represent import (
    Representation,
    SolutionCache,
    build_representation,
    default_cache_dir,
    get_solution,
    random_free_values,
    sweep,
    verify_representation,
)
from .pfaffian import SkewMatrix
from .sympoly import parse_tripoly
from .template import DEGREE_CAP, build_template, check_degree, counts, render

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3

log = logging.getLogger("pfaffrep")


@dataclass
class CliConfig:
    subcommand: str
    degree: int | None = None
    degree_from: int | None = None
    degree_to: int | None = None
    ring: str | None = None  # None for verify means "take it from the file"
    poly: str | None = None
    poly_file: str | None = None
    matrix: str | None = None
    free: str = "zeros"
    fmt: str = "json"
    cache_dir: str | None = None
    degree_cap: int = DEGREE_CAP
    allow_unverified: bool = False
    verbosity: int = 0

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "CliConfig":
        return cls(
            subcommand=ns.command,
            degree=getattr(ns, "degree", None),
            degree_from=getattr(ns, "d_from", None),
            degree_to=getattr(ns, "d_to", None),
            ring=getattr(ns, "ring", None),
            poly=getattr(ns, "poly", None),
            poly_file=getattr(ns, "poly_file", None),
            matrix=getattr(ns, "matrix", None),
            free=getattr(ns, "free", "zeros"),
            fmt=getattr(ns, "format", "json"),
            cache_dir=None if ns.no_cache else (ns.cache_dir or str(default_cache_dir())),
            degree_cap=ns.degree_cap,
            allow_unverified=ns.allow_unverified,
            verbosity=ns.verbose,
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", help="solution cache directory (default: $PFAFFREP_CACHE or ./cache)")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write the solution cache")
    common.add_argument("--degree-cap", type=int, default=DEGREE_CAP, help="largest degree accepted without --allow-unverified")
    common.add_argument("--allow-unverified", action="store_true", help="accept degrees above the cap")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(
        prog="pfaffrep",
        description="Linear Pfaffian representations of ternary forms of degree d >= 5.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("template", parents=[common], help="print the symbolic 2d x 2d template")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--format", choices=("json", "text", "latex"), default="json")

    p = sub.add_parser("solve", parents=[common], help="solve and cache the integer parametric solution")
    p.add_argument("--degree", type=int, required=True)

    p = sub.add_parser("build", parents=[common], help="emit a verified representation of a polynomial")
    p.add_argument("--degree", type=int, required=True)
    _poly_args(p)
    p.add_argument("--ring", default="int", help="int, rat or mod:<n>")
    p.add_argument("--free", default="zeros", help="zeros, random:<seed>, or a JSON file with a list of values")
    p.add_argument("--no-verify", action="store_true", help="skip the Pfaffian check (benchmarking only)")
    p.add_argument("--format", choices=("json", "text", "latex"), default="json")

    p = sub.add_parser("verify", parents=[common], help="check Pf(matrix) = f")
    p.add_argument("--matrix", required=True, help="representation JSON as written by 'build'")
    _poly_args(p)
    p.add_argument("--ring", default=None, help="ring for a bare matrix file (default: taken from the file)")

    p = sub.add_parser("sweep", parents=[common], help="solve and sample-verify a range of degrees")
    p.add_argument("--from", dest="d_from", type=int, required=True)
    p.add_argument("--to", dest="d_to", type=int, required=True)
    p.add_argument("--samples", type=int, default=1, help="random polynomials per degree and ring")
    p.add_argument("--rings", default="int", help="comma-separated ring descriptors")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timings", action="store_true", help="include wall times in the JSON output")
    p.add_argument("--format", choices=("json", "text"), default="json")
    return parser


def _poly_args(p: argparse.ArgumentParser):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--poly", help="polynomial text, or @path to read it from a file")
    g.add_argument("--poly-file", help="file containing the polynomial")


def _emit(obj):
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _poly_text(cfg: CliConfig) -> str:
    if cfg.poly_file is not None:
        path = cfg.poly_file
    elif cfg.poly is not None and cfg.poly.startswith("@"):
        path = cfg.poly[1:]
    else:
        return cfg.poly
    try:
        return Path(path).read_text().strip()
    except OSError as exc:
        raise UsageError(f"cannot read polynomial file: {exc}") from exc


def _cache(cfg: CliConfig):
    return SolutionCache(cfg.cache_dir) if cfg.cache_dir else None


def _check(cfg: CliConfig, d: int) -> bool:
    """Apply the CLI cap; return the allow_unverified flag for downstream calls."""
    check_degree(d, cfg.degree_cap, cfg.allow_unverified)
    return d > DEGREE_CAP


def _free_values(policy: str, sol, ring) -> list:
    if policy == "zeros":
        return [ring.zero] * sol.free_count
    if policy.startswith("random:"):
        try:
            seed = int(policy.split(":", 1)[1])
        except ValueError:
            raise UsageError(f"bad seed in --free {policy!r}") from None
        return random_free_values(sol, ring, random.Random(seed))
    try:
        values = json.loads(Path(policy).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"--free expects zeros, random:<seed> or a JSON list file: {exc}") from exc
    if not isinstance(values, list):
        raise UsageError("free-value file must hold a JSON list")
    return [ring.decode(v) for v in values]


def cmd_template(cfg: CliConfig) -> int:
    allow = _check(cfg, cfg.degree)
    T = build_template(cfg.degree, allow_unverified=allow)
    sys.stdout.write(render(T, cfg.fmt) + ("\n" if cfg.fmt == "json" else ""))
    return EXIT_OK


def cmd_solve(cfg: CliConfig) -> int:
    d = cfg.degree
    allow = _check(cfg, d)
    try:
        sol = get_solution(d, _cache(cfg), allow_unverified=allow)
    except NotSolvableOverZ as exc:
        _emit({"degree": d, "counts": counts(d), "certificate": {
            "solvable_over_Z": False, "failing_theta_column": exc.theta_column, "residue": exc.residue}})
        print(f"pfaffrep: {exc}", file=sys.stderr)
        return EXIT_FALSE
    _emit({
        "degree": d,
        "counts": counts(d),
        "rank": sol.rank,
        "free_count": sol.free_count,
        "certificate": sol.certificate,
    })
    return EXIT_OK


def cmd_build(cfg: CliConfig, no_verify: bool) -> int:
    d = cfg.degree
    allow = _check(cfg, d)
    ring = parse_ring(cfg.ring)
    f = parse_tripoly(_poly_text(cfg), d, ring)
    sol = get_solution(d, _cache(cfg), allow_unverified=allow)
    free = _free_values(cfg.free, sol, ring)
    rep = build_representation(d, f, free, solution=sol, verify=not no_verify, allow_unverified=allow)
    if cfg.fmt == "json":
        _emit(rep.to_json())
    elif cfg.fmt == "latex":
        sys.stdout.write(rep.matrix.to_latex() + "\n")
    else:
        for (i, j) in sorted(rep.matrix.upper):
            sys.stdout.write(f"({i},{j}): {rep.matrix.upper[(i, j)]}\n")
    return EXIT_OK


def _load_matrix(path: str, ring_text: str | None):
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read matrix file {path}: {exc}") from exc
    try:
        if "matrix" in obj:
            rep = Representation.from_json(obj)
            if ring_text is not None and parse_ring(ring_text) != rep.ring:
                raise UsageError(f"--ring {ring_text} disagrees with the file's ring {rep.ring}")
            return rep
        ring = parse_ring(ring_text or "int")
        M = SkewMatrix.from_json(obj, ring)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"malformed matrix file {path}: {exc}") from exc
    if M.size % 2:
        raise UsageError(f"matrix size {M.size} is odd")
    return Representation(M.size // 2, ring, M, [], "file")


def cmd_verify(cfg: CliConfig) -> int:
    rep = _load_matrix(cfg.matrix, cfg.ring)
    f = parse_tripoly(_poly_text(cfg), rep.matrix.size // 2, rep.ring)
    verdict = verify_representation(rep, f)
    out = {"verified": verdict.ok, "degree": rep.matrix.size // 2, "ring": rep.ring.descriptor}
    if not verdict.ok:
        out["witness"] = {
            "monomial": list(verdict.witness) if verdict.witness else None,
            "expected": str(verdict.expected),
            "got": str(verdict.got),
        }
        print(f"pfaffrep: Pf(M) != f, witness {out['witness']}", file=sys.stderr)
    _emit(out)
    return EXIT_OK if verdict.ok else EXIT_FALSE


def cmd_sweep(cfg: CliConfig, ns) -> int:
    _check(cfg, cfg.degree_from)
    allow = _check(cfg, cfg.degree_to)
    rings = [r.strip() for r in ns.rings.split(",") if r.strip()]
    for r in rings:
        parse_ring(r)
    if ns.samples < 0 or ns.jobs < 1:
        raise UsageError("--samples must be >= 0 and --jobs >= 1")
    report = sweep(cfg.degree_from, cfg.degree_to, ns.samples, rings, seed=ns.seed,
                   cache_dir=cfg.cache_dir, jobs=ns.jobs, allow_unverified=allow)
    if cfg.fmt == "text":
        sys.stdout.write(report.table())
    else:
        _emit(report.to_json(timings=ns.timings))
    for row in report.rows:
        for msg in row.failures:
            print(f"pfaffrep: degree {row.degree}: {msg}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FALSE


def run(argv: list | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    cfg = CliConfig.from_args(ns)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(cfg.verbosity, 2),
        format="pfaffrep: %(levelname)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        if cfg.subcommand == "template":
            return cmd_template(cfg)
        if cfg.subcommand == "solve":
            return cmd_solve(cfg)
        if cfg.subcommand == "build":
            return cmd_build(cfg, ns.no_verify)
        if cfg.subcommand == "verify":
            return cmd_verify(cfg)
        return cmd_sweep(cfg, ns)
    except UsageError as exc:
        print(f"pfaffrep: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotSolvableOverZ as exc:
        print(f"pfaffrep: {exc}", file=sys.stderr)
        return EXIT_FALSE
    except InternalInvariantError as exc:
        print(f"pfaffrep: internal error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except PfaffrepError as exc:
        print(f"pfaffrep: internal error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())
