from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from pfaffrep.coeffring import QQ, ZZ, ModularRing, RingValue
from pfaffrep.errors import DegreeMismatch, NonHomogeneous, PolySyntaxError
from pfaffrep.linsolve import theta_numbering
from pfaffrep.pfaffian import pf_structured
from pfaffrep.sympoly import (
    SYMBOLIC,
    Monomial3,
    SymbolicCoefficient as SC,
    TriPoly,
    coefficient_of,
    entry,
    format_tripoly,
    monomials,
    param,
    parse_symbol,
    parse_symbolic,
    parse_tripoly,
    sym_add,
    sym_mul,
    symbols_of,
    theta,
    tri_mul,
)
from pfaffrep.template import build_template, flat_name

X, Y, Z = sympy.symbols("x y z")


def lin(a, b, c, ring=ZZ):
    return TriPoly.linear(a, b, c, ring)


# -- symbols ----------------------------------------------------------------


@pytest.mark.parametrize("s", [theta(5, 0, 0), entry("b", 1, 2), param(24), entry("c", 5, 6)])
def test_symbol_text_roundtrip(s):
    assert parse_symbol(str(s)) == s


def test_symbol_rejects_bad_indices():
    with pytest.raises(ValueError):
        entry("a", 3, 2)
    with pytest.raises(ValueError):
        entry("q", 1, 2)


# -- symbolic coefficients --------------------------------------------------


def test_identity_multiplication():
    t2 = SC.symbol(theta(0, 5, 0))
    assert sym_mul(t2 + 3, SC.const(1)) == t2 + 3


def test_cancellation_drops_term():
    a1, b2 = SC.symbol(entry("a", 1, 2)), SC.symbol(entry("b", 1, 3))
    out = sym_add(a1 + b2, -a1)
    assert out == b2
    assert len(out.terms) == 1


def test_product_of_two_symbols():
    a1, b2 = SC.symbol(entry("a", 1, 2)), SC.symbol(entry("b", 1, 3))
    p = sym_mul(a1, b2)
    assert p.symbol_degree() == 2
    assert list(p.terms.values()) == [1]


def test_linear_terms_rejects_nonlinear():
    a = SC.symbol(entry("a", 1, 2))
    with pytest.raises(ValueError):
        (a * a).linear_terms()


def test_str_parse_roundtrip():
    c = SC.linear({entry("a", 1, 3): -1, theta(0, 5, 0): -1, entry("c", 2, 4): 2}, constant=7)
    assert parse_symbolic(str(c)) == c
    assert str(c).endswith("+ 7")


def test_evaluate_in_mod6():
    a = entry("a", 1, 2)
    c = SC.symbol(a, 4) + 5
    assert c.evaluate({a: 2}, ModularRing(6)) == (4 * 2 + 5) % 6


_syms = [entry("a", 1, 2), entry("b", 2, 3), theta(5, 0, 0), param(1)]
sym_coeffs = st.dictionaries(
    st.lists(st.sampled_from(_syms), max_size=3).map(lambda l: tuple(sorted(l))),
    st.integers(-20, 20),
    max_size=4,
).map(SC)


def _to_sympy(c: SC):
    names = {s: sympy.Symbol(str(s)) for s in _syms}
    return sum((v * sympy.Mul(*(names[s] for s in key)) for key, v in c.terms.items()), sympy.Integer(0))


@given(sym_coeffs, sym_coeffs, sym_coeffs)
def test_symbolic_ring_axioms(p, q, r):
    assert p + q == q + p
    assert p * q == q * p
    assert (p + q) + r == p + (q + r)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p - p) == SC.const(0) and not (p - p).terms
    assert all(v != 0 for v in (p * q).terms.values())


@given(sym_coeffs, sym_coeffs)
def test_symbolic_product_matches_sympy(p, q):
    assert sympy.expand(_to_sympy(p * q) - _to_sympy(p) * _to_sympy(q)) == 0


@given(sym_coeffs)
def test_symbol_degree_is_max_key_length(p):
    assert p.symbol_degree() == max((len(k) for k in p.terms), default=0)


# -- TriPoly ----------------------------------------------------------------


def test_monomial_order_graded_lex():
    assert monomials(2) == [(2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2)]
    assert len(monomials(5)) == 21


def test_tri_mul_x_y():
    assert tri_mul(lin(1, 0, 0), lin(0, 1, 0)) == TriPoly(2, {(1, 1, 0): 1}, ZZ)


def test_difference_of_squares():
    p = tri_mul(lin(1, 1, 0), lin(1, -1, 0))
    assert p == TriPoly(2, {(2, 0, 0): 1, (0, 2, 0): -1}, ZZ)


def test_symbol_carried_through():
    t1 = SC.symbol(theta(5, 0, 0))
    p = tri_mul(TriPoly.linear(t1, 0, 0), TriPoly.linear(0, 0, 1))
    assert p.coeffs == {(1, 0, 1): t1}


def test_mixed_rings_rejected():
    from pfaffrep.errors import MismatchedRing

    with pytest.raises(MismatchedRing):
        lin(1, 0, 0) * lin(1, 0, 0, ModularRing(6))


def test_coefficient_of_examples():
    t1, t2 = SC.symbol(theta(5, 0, 0)), SC.symbol(theta(0, 5, 0))
    p = TriPoly(5, {(5, 0, 0): t1, (0, 5, 0): t2})
    assert coefficient_of(p, (5, 0, 0)) == t1
    sq = TriPoly(2, {(2, 0, 0): 1, (0, 2, 0): -1}, ZZ)
    assert coefficient_of(sq, (1, 1, 0)) == RingValue(ZZ, 0)
    with pytest.raises(DegreeMismatch):
        coefficient_of(sq, (1, 0, 0))


def test_coefficient_of_template_pfaffian_in_flat_naming():
    pf = pf_structured(build_template(5))
    c = coefficient_of(pf, Monomial3(1, 3, 1))
    nums = theta_numbering(5)
    flat = {flat_name(s, 5, nums): v for s, v in c.linear_terms().items()}
    assert flat == {"b3": -1, "c11": 1, "Theta2": -1, "a2": -1}


def test_symbols_of():
    p = TriPoly.linear(SC.symbol(theta(1, 0, 0)), SC.symbol(entry("a", 1, 2)), 0)
    assert symbols_of([p]) == {theta(1, 0, 0), entry("a", 1, 2)}


def test_rejects_nonhomogeneous_construction():
    with pytest.raises(NonHomogeneous):
        TriPoly(2, {(1, 0, 0): 1}, ZZ)


def _tri_sympy(p: TriPoly):
    return sum((sympy.Rational(str(c)) * X**i * Y**j * Z**k for (i, j, k), c in p.coeffs.items()), sympy.Integer(0))


def tripolys(d, ring=ZZ):
    return st.dictionaries(st.sampled_from(monomials(d)), st.integers(-9, 9), max_size=6).map(
        lambda c: TriPoly(d, c, ring)
    )


@given(tripolys(1), tripolys(2), tripolys(2))
def test_tri_mul_laws(p, q, r):
    assert p * q == q * p
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p * q).degree == 3
    assert all(sum(m) == 3 for m in (p * q).coeffs)


@given(tripolys(2), tripolys(3))
def test_tri_mul_matches_sympy(p, q):
    assert sympy.expand(_tri_sympy(p * q) - _tri_sympy(p) * _tri_sympy(q)) == 0


# -- parsing ----------------------------------------------------------------


def test_parse_fermat():
    p = parse_tripoly("x^5 + y^5 + z^5", 5, ZZ)
    assert p.coeffs == {(5, 0, 0): 1, (0, 5, 0): 1, (0, 0, 5): 1}


def test_parse_direct_reading():
    p = parse_tripoly("2*x^2*y*z^2 - x*y^4", 5, ZZ)
    assert p.coeffs == {(2, 1, 2): 2, (1, 4, 0): -1}


def test_parse_nonhomogeneous():
    with pytest.raises(NonHomogeneous) as info:
        parse_tripoly("x^4", 5, ZZ)
    assert "x^4" in str(info.value)


@pytest.mark.parametrize(
    "text, pos",
    [("x^5 +", 5), ("x^5 ++ y^5", 5), ("x^5 y^5", 4), ("3*", 2), ("x^y", 2), ("x^5 + w^5", 6)],
)
def test_parse_syntax_errors_carry_position(text, pos):
    with pytest.raises(PolySyntaxError) as info:
        parse_tripoly(text, 5, ZZ)
    assert info.value.position == pos


def test_parse_rational_and_residue():
    assert parse_tripoly("1/2*x^2 - 3/4 x*y", 2, QQ).coeffs == {(2, 0, 0): Fraction(1, 2), (1, 1, 0): Fraction(-3, 4)}
    assert parse_tripoly("7*x^2 + 5*y^2 - z^2", 2, ModularRing(6)).coeffs == {(2, 0, 0): 1, (0, 2, 0): 5, (0, 0, 2): 5}


def test_parse_combines_like_terms():
    assert parse_tripoly("x*y + y*x - 2*x*y", 2, ZZ).coeffs == {}


@pytest.mark.parametrize("ring", [ZZ, QQ, ModularRing(6)], ids=str)
@given(data=st.data())
def test_print_parse_roundtrip(ring, data):
    coeffs = data.draw(st.dictionaries(st.sampled_from(monomials(4)), st.integers(-50, 50), max_size=8))
    if ring == QQ:
        den = data.draw(st.integers(1, 7))
        coeffs = {m: Fraction(c, den) for m, c in coeffs.items()}
    p = TriPoly(4, coeffs, ring)
    assert parse_tripoly(format_tripoly(p), 4, ring) == p


def test_symbolic_display():
    t1 = SC.symbol(theta(5, 0, 0))
    p = TriPoly(5, {(5, 0, 0): t1, (0, 5, 0): SC.const(-1)}, SYMBOLIC)
    assert format_tripoly(p) == "Theta[5,0,0]*x^5 - y^5"
