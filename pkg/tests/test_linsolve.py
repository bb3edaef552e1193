from __future__ import annotations

import random
from dataclasses import replace

import pytest

from golden import as_equation, load
from pfaffrep.errors import InternalInvariantError, NotSolvableOverZ, PurePowerViolation
from pfaffrep.intmat import matmul
from pfaffrep.linsolve import (
    LinearSystem,
    ParametricSolution,
    canonical_lattice_basis,
    extract_system,
    reduce_modulo_lattice,
    solve_parametric,
    substitute,
    theta_numbering,
    verify_solution,
)
from pfaffrep.pfaffian import LinearForm, SkewMatrix
from pfaffrep.sympoly import SYMBOLIC, SymbolicCoefficient as SC, entry, theta
from pfaffrep.template import build_template, counts, flat_name


@pytest.fixture(scope="module")
def d5():
    system = extract_system(build_template(5))
    return system, solve_parametric(system)


def flat_equation(system, row):
    lhs, rhs = system.equation(row)
    nums = theta_numbering(system.degree)
    name = lambda s: flat_name(s, system.degree, nums)  # noqa: E731
    return {name(s): v for s, v in lhs.items()}, {name(s): v for s, v in rhs.items()}


def test_theta_numbering_d5():
    nums = theta_numbering(5)
    assert nums[(5, 0, 0)] == 1 and nums[(0, 5, 0)] == 2 and nums[(0, 0, 5)] == 3
    assert nums[(4, 1, 0)] == 4 and nums[(1, 4, 0)] == 7
    assert nums[(4, 0, 1)] == 8 and nums[(0, 4, 1)] == 12 and nums[(0, 1, 4)] == 15
    assert nums[(1, 1, 3)] == 16 and nums[(1, 3, 1)] == 18 and nums[(2, 1, 2)] == 19 and nums[(3, 1, 1)] == 21
    assert sorted(nums.values()) == list(range(1, 22))


@pytest.mark.parametrize("d", [5, 6, 9])
def test_system_dimensions(d):
    s = extract_system(build_template(d))
    c = counts(d)
    assert len(s.A) == len(s.T) == len(s.monomials) == c["equations"]
    assert all(len(r) == c["unknowns"] for r in s.A)
    assert all(len(r) == c["thetas"] for r in s.T)
    for m, trow in zip(s.monomials, s.T):
        assert trow[s.thetas.index(theta(*m))] == 1


def test_x4y_equation(d5):
    system, _ = d5
    row = system.monomials.index((4, 1, 0))
    lhs, rhs = system.equation(row)
    assert lhs == {entry("b", 1, 2): 1, entry("a", 2, 6): -1}
    assert rhs == {theta(4, 1, 0): 1}
    assert flat_equation(system, row) == ({"b1": 1, "a13": -1}, {"Theta4": 1})


def test_xy3z_equation_moves_theta(d5):
    system, _ = d5
    row = system.monomials.index((1, 3, 1))
    lhs, rhs = system.equation(row)
    assert lhs == {entry("c", 2, 4): 1, entry("b", 1, 4): -1, entry("a", 1, 3): -1}
    assert rhs == {theta(1, 3, 1): 1, theta(0, 5, 0): 1}


def test_x3yz_equation(d5):
    system, _ = d5
    row = system.monomials.index((3, 1, 1))
    assert flat_equation(system, row) == ({"a11": -2, "a4": -1, "c13": -1, "b12": -1, "b5": 1}, {"Theta21": 1})


def test_golden_system_d5(d5):
    system, _ = d5
    golden = load("d5_system.json")
    want = sorted((sorted(l.items()), sorted(r.items())) for l, r in (as_equation(e["lhs"], e["rhs"]) for e in golden["equations"]))
    got = sorted((sorted(l.items()), sorted(r.items())) for l, r in (flat_equation(system, i) for i in range(len(system.A))))
    assert got == want


def test_equation_text_flat_naming(d5):
    system, _ = d5
    row = system.monomials.index((4, 1, 0))
    assert system.equation_text(row, naming="flat") == "-a13 + b1 = Theta4"
    assert system.equation_text(row) == "-a[2,6] + b[1,2] = Theta[4,1,0]"


def test_solution_shape_d5(d5):
    _, sol = d5
    assert sol.rank == 18 and sol.free_count == 24 and sol.components == 42
    assert sol.certificate["solvable_over_Z"] is True
    assert sol.certificate["invariant_factor_report"]["full_row_rank"] is True


def test_fermat_particular_solution(d5):
    system, sol = d5
    th = [1 if max(s.idx) == 5 else 0 for s in system.thetas]
    u = substitute(sol, th)
    nonzero = {s: v for s, v in zip(system.unknowns, u) if v}
    assert nonzero == {entry("c", 2, 4): 1, entry("b", 5, 6): 3}
    # independent check against the transcribed equations
    flat_u = {flat_name(s, 5): v for s, v in zip(system.unknowns, u)}
    flat_th = {f"Theta{n}": 1 if n <= 3 else 0 for n in range(1, 22)}
    for e in load("d5_system.json")["equations"]:
        lhs, rhs = as_equation(e["lhs"], e["rhs"])
        assert sum(v * flat_u.get(k, 0) for k, v in lhs.items()) == sum(v * flat_th[k] for k, v in rhs.items())


def test_verify_solution_detects_perturbation(d5):
    system, sol = d5
    assert verify_solution(system, sol)
    for i, j in [(0, 0), (7, 3), (41, 20)]:
        bad = [row[:] for row in sol.particular]
        bad[i][j] += 1
        assert not verify_solution(system, replace(sol, particular=bad))
    badn = [row[:] for row in sol.nullspace]
    badn[5][2] += 1
    assert not verify_solution(system, replace(sol, nullspace=badn))


def test_verify_zero_system():
    assert verify_solution(LinearSystem(5, [], (), (), [], []), ParametricSolution(5, 0, [], [], {}))


@pytest.mark.parametrize("d", range(5, 13))
def test_solvable_and_substitution(d):
    system = extract_system(build_template(d))
    sol = solve_parametric(system)
    assert sol.certificate["solvable_over_Z"]
    assert sol.rank + sol.free_count == len(system.unknowns)
    rng = random.Random(d)
    for _ in range(100):
        th = [rng.randint(-50, 50) for _ in system.thetas]
        t = [rng.randint(-50, 50) for _ in range(sol.free_count)]
        u = substitute(sol, th, t)
        assert matmul(system.A, [[v] for v in u]) == matmul(system.T, [[v] for v in th])


@pytest.mark.parametrize("d", [5, 7])
def test_specialisation_commutes(d):
    system = extract_system(build_template(d))
    sol = solve_parametric(system)
    rng = random.Random(10 + d)
    for n in range(2, 13):
        th = [rng.randint(0, n - 1) for _ in system.thetas]
        t = [rng.randint(0, n - 1) for _ in range(sol.free_count)]
        u = [v % n for v in substitute(sol, th, t)]
        for arow, trow in zip(system.A, system.T):
            lhs = sum(a * v for a, v in zip(arow, u)) % n
            rhs = sum(c * v for c, v in zip(trow, th)) % n
            assert lhs == rhs


def test_solution_is_deterministic_and_reduced(d5):
    system, sol = d5
    again = solve_parametric(extract_system(build_template(5)))
    assert again == sol
    basis = canonical_lattice_basis(sol.nullspace)
    assert basis == sol.nullspace
    for c in range(len(system.thetas)):
        col = [row[c] for row in sol.particular]
        assert reduce_modulo_lattice(col, basis) == col


def test_reduce_modulo_lattice_small():
    basis = [[2], [1]]
    assert reduce_modulo_lattice([5, 7], basis) == [1, 5]
    assert reduce_modulo_lattice([-1, 0], basis) == [1, 1]


def test_json_roundtrip(d5):
    _, sol = d5
    assert ParametricSolution.from_json(sol.to_json()) == sol
    bad = sol.to_json()
    bad["format_version"] = 7
    with pytest.raises(ValueError):
        ParametricSolution.from_json(bad)


def test_not_solvable_over_z():
    u = entry("a", 1, 2)
    system = LinearSystem(5, [(4, 1, 0)], (u,), (theta(4, 1, 0),), [[2]], [[1]])
    with pytest.raises(NotSolvableOverZ) as info:
        solve_parametric(system)
    assert "Theta[4,1,0]" in str(info.value)


def test_pure_power_violation_detected():
    T = build_template(5)
    upper = dict(T.matrix.upper)
    upper[(1, 2)] = LinearForm(SC.symbol(theta(5, 0, 0), 2), SC.symbol(entry("b", 1, 2)), SC.symbol(entry("c", 1, 2))).to_poly(SYMBOLIC)
    broken = replace(T, matrix=SkewMatrix(10, upper, SYMBOLIC))
    with pytest.raises(PurePowerViolation):
        extract_system(broken)
    assert issubclass(PurePowerViolation, InternalInvariantError)
