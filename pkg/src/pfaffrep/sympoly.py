"""Symbols, integer polynomials in symbols, and homogeneous polynomials in x, y, z.

A :class:`TriPoly` stores its coefficients in a *domain*: one of the concrete
rings from :mod:`pfaffrep.coeffring`, or :data:`SYMBOLIC`, whose elements are
:class:`SymbolicCoefficient` instances (integer polynomials in named symbols
such as ``Theta[5,0,0]``, ``b[1,2]`` or ``t[3]``).
"""

from __future__ import annotations

import re
from typing import Iterable, NamedTuple

from .coeffring import Ring, RingValue
from .errors import DegreeMismatch, MismatchedRing, NonHomogeneous, PolySyntaxError


class Symbol(NamedTuple):
    kind: str  # "theta", "a", "b", "c" or "t"
    idx: tuple

    def __str__(self):
        name = "Theta" if self.kind == "theta" else self.kind
        return f"{name}[{','.join(map(str, self.idx))}]"


def theta(i: int, j: int, k: int) -> Symbol:
    return Symbol("theta", (i, j, k))


def entry(axis: str, row: int, col: int) -> Symbol:
    if axis not in ("a", "b", "c"):
        raise ValueError(f"axis must be a, b or c, not {axis!r}")
    if not 1 <= row < col:
        raise ValueError(f"entry coefficient must lie above the diagonal: ({row},{col})")
    return Symbol(axis, (row, col))


def param(r: int) -> Symbol:
    if r < 1:
        raise ValueError("free parameters are numbered from 1")
    return Symbol("t", (r,))


_SYMBOL_RE = re.compile(r"(Theta|a|b|c|t)\[(\d+(?:,\d+)*)\]")


def parse_symbol(text: str) -> Symbol:
    m = _SYMBOL_RE.fullmatch(text.strip())
    if not m:
        raise ValueError(f"not a symbol: {text!r}")
    kind = "theta" if m.group(1) == "Theta" else m.group(1)
    return Symbol(kind, tuple(int(v) for v in m.group(2).split(",")))


class SymbolicCoefficient:
    """Integer polynomial in symbols, stored as {sorted symbol tuple: int}.

    The empty tuple keys the constant term.  Zero coefficients are never
    stored, so structural equality is mathematical equality.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms = {}
        if terms:
            for key, c in terms.items():
                if c:
                    key = tuple(sorted(key))
                    c = self.terms.get(key, 0) + c
                    if c:
                        self.terms[key] = c
                    else:
                        self.terms.pop(key, None)

    @classmethod
    def _wrap(cls, terms: dict) -> "SymbolicCoefficient":
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, n: int) -> "SymbolicCoefficient":
        return cls._wrap({(): n} if n else {})

    @classmethod
    def symbol(cls, s: Symbol, coeff: int = 1) -> "SymbolicCoefficient":
        return cls._wrap({(s,): coeff} if coeff else {})

    @classmethod
    def linear(cls, coeffs: dict, constant: int = 0) -> "SymbolicCoefficient":
        terms = {(s,): c for s, c in coeffs.items() if c}
        if constant:
            terms[()] = constant
        return cls._wrap(terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = SymbolicCoefficient.const(other)
        if not isinstance(other, SymbolicCoefficient):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        if isinstance(other, int):
            if not other:
                return self
            other = SymbolicCoefficient.const(other)
        elif not isinstance(other, SymbolicCoefficient):
            return NotImplemented
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = dict(self.terms)
        for key, c in other.terms.items():
            c += out.get(key, 0)
            if c:
                out[key] = c
            else:
                del out[key]
        return SymbolicCoefficient._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return SymbolicCoefficient._wrap({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, n: int) -> "SymbolicCoefficient":
        if not n:
            return SymbolicCoefficient._wrap({})
        if n == 1:
            return self
        return SymbolicCoefficient._wrap({k: n * c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        if not isinstance(other, SymbolicCoefficient):
            return NotImplemented
        if len(other.terms) == 1 and () in other.terms:
            return self.scale(other.terms[()])
        if len(self.terms) == 1 and () in self.terms:
            return other.scale(self.terms[()])
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                key = tuple(sorted(k1 + k2))
                c = out.get(key, 0) + c1 * c2
                if c:
                    out[key] = c
                else:
                    out.pop(key, None)
        return SymbolicCoefficient._wrap(out)

    __rmul__ = __mul__

    def symbol_degree(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def is_constant(self) -> bool:
        return all(not k for k in self.terms)

    @property
    def constant(self) -> int:
        return self.terms.get((), 0)

    def symbols(self) -> set:
        return {s for key in self.terms for s in key}

    def linear_terms(self) -> dict:
        """Symbol -> coefficient for an affine coefficient.

        Raises ValueError when some monomial has degree two or more.
        """
        out = {}
        for key, c in self.terms.items():
            if len(key) > 1:
                raise ValueError(f"coefficient {self} is not affine")
            if key:
                out[key[0]] = c
        return out

    def subs(self, values: dict) -> "SymbolicCoefficient":
        """Substitute ints or SymbolicCoefficients for symbols."""
        out = SymbolicCoefficient._wrap({})
        for key, c in self.terms.items():
            term = SymbolicCoefficient.const(c)
            for s in key:
                v = values.get(s)
                if v is None:
                    term = term * SymbolicCoefficient.symbol(s)
                else:
                    term = term * v
            out = out + term
        return out

    def evaluate(self, values: dict, ring: Ring):
        """Raw value in ``ring`` given raw values for every symbol present."""
        total = ring.zero
        for key, c in self.terms.items():
            term = ring.coerce_int(c)
            for s in key:
                try:
                    term = term * values[s]
                except KeyError:
                    raise KeyError(f"no value for symbol {s}") from None
            total = ring.norm(total + term)
        return total

    def _sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: (len(kv[0]) == 0, kv[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for key, c in self._sorted_terms():
            body = "*".join(str(s) for s in key)
            if not body:
                text = str(abs(c))
            elif abs(c) == 1:
                text = body
            else:
                text = f"{abs(c)}*{body}"
            if not parts:
                parts.append(text if c > 0 else f"-{text}")
            else:
                parts.append(("+ " if c > 0 else "- ") + text)
        return " ".join(parts)

    def __repr__(self):
        return f"SymbolicCoefficient({self})"


class SymbolicDomain:
    """Coefficient domain whose elements are SymbolicCoefficients."""

    descriptor = "symbolic"
    zero = SymbolicCoefficient._wrap({})
    one = SymbolicCoefficient._wrap({(): 1})

    def norm(self, raw):
        return raw

    def coerce_int(self, n: int) -> SymbolicCoefficient:
        return SymbolicCoefficient.const(n)

    def is_zero(self, raw) -> bool:
        return not raw

    def format(self, raw) -> str:
        return str(raw)

    def encode(self, raw):
        return str(raw)

    def decode(self, obj):
        return parse_symbolic(str(obj))

    def __eq__(self, other):
        return isinstance(other, SymbolicDomain)

    def __hash__(self):
        return hash("symbolic")

    def __str__(self):
        return "symbolic"


SYMBOLIC = SymbolicDomain()


def parse_symbolic(text: str) -> SymbolicCoefficient:
    """Inverse of ``str(SymbolicCoefficient)``."""
    text = text.replace(" ", "")
    if text == "0":
        return SymbolicDomain.zero
    out: dict = {}
    pos = 0
    for m in re.finditer(r"([+-]?)([^+-]+)", text):
        if m.start() != pos:
            raise ValueError(f"cannot parse symbolic coefficient {text!r}")
        pos = m.end()
        sign = -1 if m.group(1) == "-" else 1
        factors = m.group(2).split("*")
        c = 1
        if factors[0].isdigit():
            c = int(factors.pop(0))
        key = tuple(sorted(parse_symbol(f) for f in factors))
        out[key] = out.get(key, 0) + sign * c
    if pos != len(text):
        raise ValueError(f"cannot parse symbolic coefficient {text!r}")
    return SymbolicCoefficient(out)


class Monomial3(NamedTuple):
    i: int
    j: int
    k: int

    @property
    def degree(self) -> int:
        return self.i + self.j + self.k


def monomials(d: int) -> list[Monomial3]:
    """All degree-d monomials, graded-lex descending with x > y > z."""
    return [Monomial3(i, j, d - i - j) for i in range(d, -1, -1) for j in range(d - i, -1, -1)]


def _mono_text(m) -> str:
    parts = []
    for name, e in zip("xyz", m):
        if e == 1:
            parts.append(name)
        elif e > 1:
            parts.append(f"{name}^{e}")
    return "*".join(parts)


class TriPoly:
    """Sparse homogeneous polynomial in x, y, z.

    ``coeffs`` maps exponent triples to raw coefficients of ``domain``;
    zero coefficients are never stored.
    """

    __slots__ = ("degree", "domain", "coeffs")

    def __init__(self, degree: int, coeffs: dict | None = None, domain=SYMBOLIC):
        self.degree = degree
        self.domain = domain
        self.coeffs = {}
        for m, c in (coeffs or {}).items():
            m = tuple(m)
            if len(m) != 3 or min(m) < 0:
                raise ValueError(f"bad monomial {m!r}")
            if sum(m) != degree:
                raise NonHomogeneous(_mono_text(m) or "1", sum(m), degree)
            if isinstance(c, int) and domain is SYMBOLIC:
                c = SymbolicCoefficient.const(c)
            elif isinstance(c, RingValue):
                if c.ring != domain:
                    raise MismatchedRing(f"{c.ring} coefficient in a {domain} polynomial")
                c = c.value
            c = domain.norm(c)
            if c:
                self.coeffs[m] = c

    @classmethod
    def _make(cls, degree: int, coeffs: dict, domain) -> "TriPoly":
        obj = cls.__new__(cls)
        obj.degree = degree
        obj.domain = domain
        obj.coeffs = coeffs
        return obj

    @classmethod
    def zero(cls, degree: int, domain=SYMBOLIC) -> "TriPoly":
        return cls._make(degree, {}, domain)

    @classmethod
    def one(cls, domain=SYMBOLIC) -> "TriPoly":
        return cls._make(0, {(0, 0, 0): domain.one}, domain)

    @classmethod
    def linear(cls, a, b, c, domain=SYMBOLIC) -> "TriPoly":
        return cls(1, {(1, 0, 0): a, (0, 1, 0): b, (0, 0, 1): c}, domain)

    @classmethod
    def monomial(cls, m, coeff=1, domain=SYMBOLIC) -> "TriPoly":
        if isinstance(coeff, int) and domain is not SYMBOLIC:
            coeff = domain.coerce_int(coeff)
        return cls(sum(m), {tuple(m): coeff}, domain)

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if not isinstance(other, TriPoly):
            return NotImplemented
        if not self.coeffs and not other.coeffs:
            return self.domain == other.domain
        return (
            self.degree == other.degree
            and self.domain == other.domain
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.degree, frozenset(self.coeffs.items())))

    def _check(self, other: "TriPoly"):
        if other.domain != self.domain:
            raise MismatchedRing(f"cannot combine {self.domain} and {other.domain} polynomials")

    def __add__(self, other: "TriPoly") -> "TriPoly":
        self._check(other)
        if not other.coeffs:
            return self
        if not self.coeffs:
            return other
        if other.degree != self.degree:
            raise DegreeMismatch(f"adding degree {self.degree} and degree {other.degree}")
        norm = self.domain.norm
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            c = norm(out[m] + c) if m in out else c
            if c:
                out[m] = c
            else:
                del out[m]
        return TriPoly._make(self.degree, out, self.domain)

    def __neg__(self) -> "TriPoly":
        norm = self.domain.norm
        return TriPoly._make(self.degree, {m: norm(-c) for m, c in self.coeffs.items()}, self.domain)

    def __sub__(self, other: "TriPoly") -> "TriPoly":
        return self + (-other)

    def scale(self, s) -> "TriPoly":
        """Multiply every coefficient by the raw scalar (or int) ``s``."""
        norm = self.domain.norm
        out = {}
        for m, c in self.coeffs.items():
            c = norm(c * s)
            if c:
                out[m] = c
        return TriPoly._make(self.degree, out, self.domain)

    def __mul__(self, other):
        if not isinstance(other, TriPoly):
            if isinstance(other, RingValue):
                other = other.value
            return self.scale(other)
        self._check(other)
        norm = self.domain.norm
        out: dict = {}
        get = out.get
        for (i1, j1, k1), c1 in self.coeffs.items():
            for (i2, j2, k2), c2 in other.coeffs.items():
                m = (i1 + i2, j1 + j2, k1 + k2)
                c = get(m)
                out[m] = c1 * c2 if c is None else c + c1 * c2
        out = {m: c for m, c in ((m, norm(c)) for m, c in out.items()) if c}
        return TriPoly._make(self.degree + other.degree, out, self.domain)

    def coefficient_of(self, m):
        m = tuple(m)
        if sum(m) != self.degree:
            raise DegreeMismatch(f"monomial {m} has degree {sum(m)}, polynomial has degree {self.degree}")
        c = self.coeffs.get(m, self.domain.zero)
        if isinstance(self.domain, Ring):
            return RingValue(self.domain, c)
        return c

    def terms(self) -> list:
        """(monomial, raw coefficient) pairs in graded-lex order, x > y > z."""
        return sorted(((Monomial3(*m), c) for m, c in self.coeffs.items()), reverse=True)

    def map_coeffs(self, fn, domain) -> "TriPoly":
        out = {}
        for m, c in self.coeffs.items():
            c = domain.norm(fn(c))
            if c:
                out[m] = c
        return TriPoly._make(self.degree, out, domain)

    def symbol_degree(self) -> int:
        if self.domain is not SYMBOLIC:
            return 0
        return max((c.symbol_degree() for c in self.coeffs.values()), default=0)

    def __str__(self):
        return format_tripoly(self)

    def __repr__(self):
        return f"TriPoly({self.degree}, {format_tripoly(self)!r}, {self.domain})"


def format_tripoly(p: TriPoly) -> str:
    """Render in the grammar accepted by :func:`parse_tripoly`.

    Symbolic coefficients with more than one term are parenthesised; that
    form is display-only.
    """
    if not p.coeffs:
        return "0"
    out = []
    for m, c in p.terms():
        mono = _mono_text(m)
        if p.domain is SYMBOLIC:
            text = str(c)
            neg = False
            if len(c.terms) == 1:
                (key, n), = c.terms.items()
                neg = n < 0
                text = str(-c) if neg else text
            else:
                text = f"({text})"
            if mono:
                text = mono if text == "1" else f"{text}*{mono}"
        else:
            neg = c < 0
            mag = -c if neg else c
            if mono:
                text = mono if mag == 1 else f"{p.domain.format(mag)}*{mono}"
            else:
                text = p.domain.format(mag)
        if not out:
            out.append(f"-{text}" if neg else text)
        else:
            out.append(("- " if neg else "+ ") + text)
    return " ".join(out)


_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<var>[xyz])|(?P<op>[\^*+-]))")


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    stripped = text.rstrip()
    while pos < len(stripped):
        m = _TOKEN_RE.match(stripped, pos)
        if not m:
            bad = len(stripped[pos:]) - len(stripped[pos:].lstrip()) + pos
            raise PolySyntaxError(f"unexpected character {stripped[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(stripped)))
    return tokens


def parse_tripoly(text: str, d: int, ring: Ring) -> TriPoly:
    """Parse a homogeneous polynomial of degree ``d`` with coefficients in ``ring``.

    Terms are joined by ``+``/``-``; a term is an optional coefficient
    (integer, ``n/m`` or residue), an optional ``*``, then ``*``-separated
    factors ``x``, ``y``, ``z`` each with an optional ``^exp``.
    """
    tokens = _tokenize(text)
    t = 0
    coeffs: dict = {}
    while True:
        kind, val, at = tokens[t]
        sign = 1
        if kind == "op" and val in "+-":
            sign = -1 if val == "-" else 1
            t += 1
        elif t > 0:
            raise PolySyntaxError("expected '+' or '-'", at)
        kind, val, term_start = tokens[t]
        coef = None
        if kind == "num":
            coef = ring.parse(val)
            t += 1
            if tokens[t][:2] == ("op", "*"):
                t += 1
                if tokens[t][0] != "var":
                    raise PolySyntaxError("expected x, y or z after '*'", tokens[t][2])
        exps = [0, 0, 0]
        while tokens[t][0] == "var":
            var = tokens[t][1]
            t += 1
            e = 1
            if tokens[t][:2] == ("op", "^"):
                t += 1
                kind, val, at = tokens[t]
                if kind != "num" or "/" in val:
                    raise PolySyntaxError("expected an integer exponent", at)
                e = int(val)
                t += 1
            exps["xyz".index(var)] += e
            if tokens[t][:2] != ("op", "*"):
                break
            t += 1
            if tokens[t][0] != "var":
                raise PolySyntaxError("expected x, y or z after '*'", tokens[t][2])
        if coef is None and exps == [0, 0, 0]:
            raise PolySyntaxError("expected a term", tokens[t][2])
        kind, val, at = tokens[t]
        if kind != "end" and not (kind == "op" and val in "+-"):
            raise PolySyntaxError(f"unexpected {val!r}", at)
        zero_term = coef is not None and ring.is_zero(ring.norm(coef))
        if sum(exps) != d and not zero_term:
            raise NonHomogeneous(text[term_start:at].strip(), sum(exps), d)
        c = ring.one if coef is None else coef
        key = tuple(exps)
        c = ring.norm(c if sign > 0 else -c)
        coeffs[key] = ring.norm(coeffs[key] + c) if key in coeffs else c
        if kind == "end":
            break
    return TriPoly(d, {m: c for m, c in coeffs.items() if c}, ring)


def sym_add(lhs: SymbolicCoefficient, rhs: SymbolicCoefficient) -> SymbolicCoefficient:
    return lhs + rhs


def sym_mul(lhs: SymbolicCoefficient, rhs: SymbolicCoefficient) -> SymbolicCoefficient:
    return lhs * rhs


def tri_mul(lhs: TriPoly, rhs: TriPoly) -> TriPoly:
    return lhs * rhs


def coefficient_of(p: TriPoly, m) -> object:
    return p.coefficient_of(m)


def symbols_of(polys: Iterable[TriPoly]) -> set:
    out = set()
    for p in polys:
        if p.domain is SYMBOLIC:
            for c in p.coeffs.values():
                out |= c.symbols()
    return out
