"""Concrete coefficient rings: the integers, the rationals and Z/nZ.

A ring object does the arithmetic on *raw* values (``int`` for ZZ and Z/n,
``Fraction`` for QQ); :class:`RingValue` pairs a raw value with its ring for
callers who want checked, self-describing elements.  Polynomial code works on
raw values and calls :meth:`Ring.norm` after each operation, which is a no-op
everywhere except Z/n.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import MismatchedRing, UsageError


class Ring:
    descriptor: str

    zero: object
    one: object

    def norm(self, raw):
        return raw

    def from_integer(self, n: int) -> "RingValue":
        """Image of ``n`` under the unique unital map Z -> R."""
        return RingValue(self, self.coerce_int(n))

    def coerce_int(self, n: int):
        return n

    def is_zero(self, raw) -> bool:
        return raw == 0

    def parse(self, text: str):
        raise NotImplementedError

    def encode(self, raw):
        """JSON-friendly form of a raw value."""
        return raw

    def decode(self, obj):
        return self.parse(str(obj))

    def format(self, raw) -> str:
        return str(raw)

    def __str__(self):
        return self.descriptor


@dataclass(frozen=True)
class IntegerRing(Ring):
    descriptor = "int"
    zero = 0
    one = 1

    def parse(self, text: str) -> int:
        text = text.strip()
        if not re.fullmatch(r"[+-]?\d+", text):
            raise UsageError(f"not an integer: {text!r}")
        return int(text)

    def decode(self, obj):
        if isinstance(obj, int) and not isinstance(obj, bool):
            return obj
        return self.parse(str(obj))


@dataclass(frozen=True)
class RationalField(Ring):
    descriptor = "rat"
    zero = Fraction(0)
    one = Fraction(1)

    def coerce_int(self, n: int) -> Fraction:
        return Fraction(n)

    def parse(self, text: str) -> Fraction:
        text = text.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise UsageError(f"not a rational number: {text!r}")
        try:
            return Fraction(text)
        except ZeroDivisionError:
            raise UsageError(f"zero denominator in {text!r}") from None

    def encode(self, raw):
        return str(raw)

    def decode(self, obj):
        if isinstance(obj, int) and not isinstance(obj, bool):
            return Fraction(obj)
        return self.parse(str(obj))


@dataclass(frozen=True)
class ModularRing(Ring):
    modulus: int

    def __post_init__(self):
        if self.modulus < 2:
            raise UsageError(f"modulus must be >= 2, got {self.modulus}")

    @property
    def descriptor(self) -> str:
        return f"mod:{self.modulus}"

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def norm(self, raw):
        return raw % self.modulus

    def coerce_int(self, n: int) -> int:
        return n % self.modulus

    def parse(self, text: str) -> int:
        return IntegerRing().parse(text) % self.modulus

    def decode(self, obj):
        if isinstance(obj, int) and not isinstance(obj, bool):
            return obj % self.modulus
        return self.parse(str(obj))


ZZ = IntegerRing()
QQ = RationalField()


def parse_ring(text: str) -> Ring:
    """Parse a ring descriptor: ``int``, ``rat`` or ``mod:<n>``."""
    text = text.strip()
    if text == "int":
        return ZZ
    if text == "rat":
        return QQ
    m = re.fullmatch(r"mod:(\d+)", text)
    if m:
        return ModularRing(int(m.group(1)))
    raise UsageError(f"unknown ring descriptor {text!r} (expected int, rat or mod:<n>)")


@dataclass(frozen=True)
class RingValue:
    """An element of one of the concrete rings."""

    ring: Ring
    value: object

    def __post_init__(self):
        object.__setattr__(self, "value", self.ring.norm(self.value))

    def _check(self, other) -> "RingValue":
        if isinstance(other, int) and not isinstance(other, bool):
            return self.ring.from_integer(other)
        if not isinstance(other, RingValue):
            return NotImplemented
        if other.ring != self.ring:
            raise MismatchedRing(f"cannot combine {self.ring} and {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RingValue(self.ring, self.value + other.value)

    __radd__ = __add__

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RingValue(self.ring, self.value * other.value)

    __rmul__ = __mul__

    def __neg__(self):
        return RingValue(self.ring, -self.value)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return RingValue(self.ring, self.value - other.value)

    def __rsub__(self, other):
        return -self + other

    def is_zero(self) -> bool:
        return self.ring.is_zero(self.value)

    def __str__(self):
        return self.ring.format(self.value)


def ring_arith(lhs: RingValue, rhs: RingValue | None, op: str) -> RingValue:
    """Dispatch ``op`` in {add, mul, neg, sub}; ``rhs`` is ignored for neg."""
    if op == "neg":
        return -lhs
    if rhs is None or lhs.ring != rhs.ring:
        raise MismatchedRing(f"cannot combine {lhs.ring} and {getattr(rhs, 'ring', None)}")
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown ring operation {op!r}")


def from_integer(n: int, target: Ring) -> RingValue:
    return target.from_integer(n)
