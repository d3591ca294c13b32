"""Exact scalars: rationals and the rational function field Q(zeta).

``Rat`` is :class:`fractions.Fraction`.  :class:`RatFunZeta` is a reduced
fraction of two univariate polynomials over Q, stored as ``flint.fmpq_poly``
objects.  Values are immutable and always kept in normal form:

* ``gcd(num, den) == 1``
* ``den`` is monic
* zero is ``0/1``

so equality is a plain comparison of the two polynomials.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

import flint

from .errors import DivisionByZero, PoleAtPoint

Rat = Fraction

_P = flint.fmpq_poly
_ZERO = _P([])
_ONE = _P([1])


def _to_fmpq(q) -> flint.fmpq:
    if isinstance(q, flint.fmpq):
        return q
    if isinstance(q, int):
        return flint.fmpq(q)
    q = Fraction(q)
    return flint.fmpq(q.numerator, q.denominator)


def _fmpq_to_rat(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


def parse_rat(text: str) -> Fraction:
    return Fraction(text.strip())


class RatFunZeta:
    """An element of Q(zeta) in canonical reduced form."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num=0, den=1):
        num = num if isinstance(num, _P) else _coerce_poly(num)
        den = den if isinstance(den, _P) else _coerce_poly(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator in RatFunZeta")
        self.num, self.den = _normalize(num, den)
        self._hash = None

    @classmethod
    def _raw(cls, num: _P, den: _P) -> "RatFunZeta":
        obj = object.__new__(cls)
        obj.num = num
        obj.den = den
        obj._hash = None
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zeta(cls) -> "RatFunZeta":
        return cls._raw(_P([0, 1]), _ONE)

    @classmethod
    def from_coeffs(cls, num: Sequence, den: Sequence = (1,)) -> "RatFunZeta":
        return cls(_P([_to_fmpq(c) for c in num]), _P([_to_fmpq(c) for c in den]))

    @classmethod
    def const(cls, q) -> "RatFunZeta":
        if isinstance(q, RatFunZeta):
            return q
        return cls._raw(_P([_to_fmpq(q)]), _ONE)

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num == _ONE and self.den == _ONE

    def is_polynomial(self) -> bool:
        return self.den == _ONE

    def is_constant(self) -> bool:
        return self.num.degree() <= 0 and self.den.degree() == 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        if self.num.is_zero():
            return Fraction(0)
        return _fmpq_to_rat(self.num[0])

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    # -- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if self.den == _ONE and other.den == _ONE:
            return RatFunZeta._raw(self.num + other.num, _ONE)
        if self.den == other.den:
            num = self.num + other.num
            if num.is_zero():
                return ZERO
            g = num.gcd(self.den)
            if g == _ONE:
                return RatFunZeta._raw(num, self.den)
            return RatFunZeta._raw(num // g, self.den // g)
        num = self.num * other.den + other.num * self.den
        if num.is_zero():
            return ZERO
        return RatFunZeta._raw(*_normalize(num, self.den * other.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunZeta._raw(-self.num, self.den)

    def __sub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        if self.den == _ONE and other.den == _ONE:
            return RatFunZeta._raw(self.num * other.num, _ONE)
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        a_num, b_den = _cancel(self.num, other.den)
        b_num, a_den = _cancel(other.num, self.den)
        return RatFunZeta._raw(a_num * b_num, a_den * b_den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunZeta":
        if self.num.is_zero():
            raise DivisionByZero("inverse of the zero function")
        lc = self.num[self.num.degree()]
        return RatFunZeta._raw(self.den / lc, self.num / lc)

    def __truediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFunZeta._raw(self.num ** e, self.den ** e)

    # -- calculus and evaluation -------------------------------------------
    def diff(self) -> "RatFunZeta":
        """d/dzeta."""
        if self.den == _ONE:
            return RatFunZeta._raw(self.num.derivative(), _ONE)
        num = self.num.derivative() * self.den - self.num * self.den.derivative()
        return RatFunZeta(num, self.den * self.den)

    def eval(self, q) -> Fraction:
        q = _to_fmpq(q)
        d = self.den(q)
        if d == 0:
            raise PoleAtPoint(f"{self} has a pole at zeta = {q}")
        return _fmpq_to_rat(self.num(q) / d)

    def subs(self, value: "RatFunZeta") -> "RatFunZeta":
        """Compose with a rational function: zeta -> value."""
        return _horner(self.num, value) / _horner(self.den, value)

    def evalf(self, z, ctx=None):
        """Numeric value at a (possibly complex) point, via mpmath."""
        import mpmath

        ctx = ctx or mpmath.mp
        return _polyval(self.num, z, ctx) / _polyval(self.den, z, ctx)

    # -- comparison, hashing, display -------------------------------------
    def __eq__(self, other):
        other = _lift(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(str(c) for c in self.num.coeffs()),
                               tuple(str(c) for c in self.den.coeffs())))
        return self._hash

    def __repr__(self):
        return f"RatFunZeta({self})"

    def __str__(self):
        n = _poly_str(self.num)
        if self.den == _ONE:
            return n
        return f"({n})/({_poly_str(self.den)})"

    def factored(self) -> str:
        """Factor numerator and denominator over Q for display."""
        if self.num.is_zero():
            return "0"
        c_num, f_num = self.num.factor()
        c_den, f_den = self.den.factor()
        content = Fraction(int(c_num.p), int(c_num.q)) / Fraction(int(c_den.p), int(c_den.q))
        parts = []
        for fac, e in f_num:
            fac, scale = _integral_primitive(fac)
            content /= scale ** e
            parts.append(_power_str(fac, e))
        den_parts = []
        for fac, e in f_den:
            fac, scale = _integral_primitive(fac)
            content *= scale ** e
            den_parts.append(_power_str(fac, e))
        head = "" if content == 1 and parts else ("-" if content == -1 and parts else str(content))
        if head and head != "-" and parts:
            head += "*"
        body = head + "*".join(parts)
        if den_parts:
            body += "/" + ("*".join(den_parts) if len(den_parts) == 1 else "(" + "*".join(den_parts) + ")")
        return body

    def to_json(self) -> dict:
        return {"num": [str(_fmpq_to_rat(c)) for c in self.num.coeffs()],
                "den": [str(_fmpq_to_rat(c)) for c in self.den.coeffs()]}

    @classmethod
    def from_json(cls, data: dict) -> "RatFunZeta":
        return cls.from_coeffs([parse_rat(s) for s in data["num"]],
                               [parse_rat(s) for s in data["den"]])


def _coerce_poly(x) -> _P:
    if isinstance(x, _P):
        return x
    if isinstance(x, (int, Fraction, flint.fmpq)):
        return _P([_to_fmpq(x)])
    if isinstance(x, Iterable):
        return _P([_to_fmpq(c) for c in x])
    raise TypeError(f"cannot build a polynomial from {x!r}")


def _lift(x):
    if isinstance(x, RatFunZeta):
        return x
    if isinstance(x, (int, Fraction)):
        return RatFunZeta.const(x)
    return NotImplemented


def _normalize(num: _P, den: _P):
    if num.is_zero():
        return _ZERO, _ONE
    g = num.gcd(den)
    if g != _ONE:
        num = num // g
        den = den // g
    lc = den[den.degree()]
    if lc != 1:
        num = num / lc
        den = den / lc
    return num, den


def _cancel(a: _P, b: _P):
    if b == _ONE:
        return a, b
    g = a.gcd(b)
    if g == _ONE:
        return a, b
    return a // g, b // g


def _horner(p: _P, value: RatFunZeta) -> RatFunZeta:
    acc = ZERO
    for c in reversed(p.coeffs()):
        acc = acc * value + RatFunZeta.const(_fmpq_to_rat(c))
    return acc


def _polyval(p: _P, z, ctx):
    acc = ctx.mpf(0)
    for c in reversed(p.coeffs()):
        acc = acc * z + ctx.mpf(int(c.p)) / int(c.q)
    return acc


def _poly_str(p: _P, var: str = "z") -> str:
    coeffs = [_fmpq_to_rat(c) for c in p.coeffs()]
    if not coeffs:
        return "0"
    terms = []
    for e in range(len(coeffs) - 1, -1, -1):
        c = coeffs[e]
        if c == 0:
            continue
        mono = "" if e == 0 else (var if e == 1 else f"{var}^{e}")
        if mono and abs(c) == 1:
            s = mono
        elif mono:
            s = f"{abs(c)}*{mono}"
        else:
            s = str(abs(c))
        terms.append(("-" if c < 0 else "+", s))
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, s in terms[1:]:
        out += f" {sign} {s}"
    return out


def _integral_primitive(p: _P):
    """Rescale a monic factor to a primitive integer polynomial."""
    coeffs = [_fmpq_to_rat(c) for c in p.coeffs()]
    from math import lcm, gcd

    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    scale = Fraction(den, g)
    return _P(ints), scale


def _power_str(p: _P, e: int) -> str:
    s = _poly_str(p)
    if p.degree() >= 1 and len([c for c in p.coeffs() if c != 0]) > 1:
        s = f"({s})"
    return s if e == 1 else f"{s}^{e}"


ZERO = RatFunZeta._raw(_ZERO, _ONE)
ONE = RatFunZeta._raw(_ONE, _ONE)
ZETA = RatFunZeta.zeta()


def rf(num, den=(1,)) -> RatFunZeta:
    """Shorthand: coefficient lists (low degree first) to a RatFunZeta."""
    return RatFunZeta.from_coeffs(num, den)


def rf_arith(op: str, a: RatFunZeta, b: RatFunZeta) -> RatFunZeta:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if b.is_zero():
            raise DivisionByZero("division by the zero function")
        return a / b
    raise ValueError(f"unknown op {op!r}")


def rf_diff(a: RatFunZeta) -> RatFunZeta:
    return a.diff()


def rf_eval(a: RatFunZeta, q) -> Fraction:
    return a.eval(q)
