from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pfaffrep.coeffring import QQ, ZZ, ModularRing, RingValue, from_integer, parse_ring, ring_arith
from pfaffrep.errors import MismatchedRing, UsageError

RINGS = [ZZ, QQ, ModularRing(2), ModularRing(6), ModularRing(97), ModularRing(2**61 - 1)]


def test_add_integers():
    assert ring_arith(RingValue(ZZ, 2), RingValue(ZZ, 3), "add") == RingValue(ZZ, 5)


def test_mul_mod6_zero_divisors():
    r = ring_arith(RingValue(ModularRing(6), 4), RingValue(ModularRing(6), 3), "mul")
    assert r.value == 0 and r.ring == ModularRing(6)


def test_add_rationals_lowest_terms():
    r = ring_arith(RingValue(QQ, Fraction(1, 2)), RingValue(QQ, Fraction(1, 3)), "add")
    assert r.value == Fraction(5, 6)
    assert (r.value.numerator, r.value.denominator) == (5, 6)


@pytest.mark.parametrize(
    "n, ring, expected",
    [(7, ModularRing(5), 2), (0, QQ, Fraction(0, 1)), (-3, ZZ, -3), (-1, ModularRing(6), 5)],
)
def test_from_integer(n, ring, expected):
    v = from_integer(n, ring)
    assert v.ring == ring and v.value == expected


def test_from_integer_one_is_unit():
    for ring in RINGS:
        one = from_integer(1, ring)
        x = from_integer(12345, ring)
        assert one * x == x


@pytest.mark.parametrize("op", ["add", "sub", "mul"])
def test_mismatched_moduli(op):
    with pytest.raises(MismatchedRing):
        ring_arith(RingValue(ModularRing(6), 1), RingValue(ModularRing(7), 1), op)


def test_mismatched_variants():
    with pytest.raises(MismatchedRing):
        RingValue(ZZ, 1) + RingValue(QQ, Fraction(1))


def test_neg_and_sub():
    m = ModularRing(6)
    assert ring_arith(RingValue(m, 2), None, "neg").value == 4
    assert ring_arith(RingValue(m, 2), RingValue(m, 5), "sub").value == 3


@pytest.mark.parametrize("ring", RINGS, ids=str)
def test_homomorphism_law_randomised(ring):
    # 10^4 random pairs per ring, with a mix of small and huge integers
    rng = random.Random(hash(str(ring)) & 0xFFFF)
    for _ in range(10_000):
        bits = rng.choice((4, 16, 64, 200))
        m = rng.randint(-(2**bits), 2**bits)
        n = rng.randint(-(2**bits), 2**bits)
        assert from_integer(m + n, ring) == from_integer(m, ring) + from_integer(n, ring)
        assert from_integer(m * n, ring) == from_integer(m, ring) * from_integer(n, ring)


@given(st.integers(), st.integers(), st.integers(min_value=2, max_value=10**6))
def test_modular_agrees_with_integer_then_reduce(a, b, n):
    R = ModularRing(n)
    x, y = RingValue(R, a), RingValue(R, b)
    assert (x + y).value == (a + b) % n
    assert (x * y).value == (a * b) % n
    assert (x - y).value == (a - b) % n
    assert 0 <= (x * y).value < n


@given(st.integers(), st.integers(min_value=1), st.integers(min_value=1, max_value=50))
def test_rational_normal_form_unique(p, q, k):
    a = RingValue(QQ, Fraction(p, q))
    b = RingValue(QQ, Fraction(p * k, q * k))
    assert a == b
    assert a.value.denominator > 0
    assert QQ.encode(a.value) == QQ.encode(b.value)


ring_values = st.sampled_from(RINGS).flatmap(
    lambda R: st.tuples(*(st.integers(-(10**30), 10**30).map(lambda n, R=R: from_integer(n, R)) for _ in range(3)))
)


@given(ring_values)
def test_ring_axioms(t):
    x, y, z = t
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == from_integer(0, x.ring)


@pytest.mark.parametrize(
    "text, ring",
    [("int", ZZ), ("rat", QQ), ("mod:6", ModularRing(6)), (" mod:97 ", ModularRing(97))],
)
def test_parse_ring(text, ring):
    assert parse_ring(text) == ring
    assert parse_ring(ring.descriptor) == ring


@pytest.mark.parametrize("text", ["", "mod:1", "mod:0", "mod:x", "real", "mod:"])
def test_parse_ring_rejects(text):
    with pytest.raises(UsageError):
        parse_ring(text)


@pytest.mark.parametrize("ring", RINGS, ids=str)
def test_encode_decode_roundtrip(ring):
    for n in (-7, 0, 1, 10**40):
        v = ring.coerce_int(n)
        assert ring.decode(ring.encode(v)) == v
    if ring == QQ:
        assert QQ.decode(QQ.encode(Fraction(-3, 4))) == Fraction(-3, 4)
