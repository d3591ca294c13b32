"""Sparse multivariate polynomials over Q(zeta).

An :class:`MPoly` is a dict from exponent tuples to nonzero
:class:`~thetapoly.scalars.RatFunZeta` coefficients.  The number of variables
is fixed per polynomial; specialization drops a variable instead of leaving a
phantom one behind.  :class:`MRat` is a plain numerator/denominator pair used
for the handful of genuinely rational objects (T with negative indices, the
operator coefficients).
"""

from __future__ import annotations

import heapq
from itertools import combinations, permutations
from math import comb, factorial
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple

from .errors import ArityMismatch, DivisionByZero, InexactDivision, PoleAtPoint
from .scalars import ONE, ZERO, RatFunZeta

Exp = Tuple[int, ...]


def _coeff(c) -> RatFunZeta:
    return c if isinstance(c, RatFunZeta) else RatFunZeta.const(c)


def _grlex_key(e: Exp):
    return (sum(e), e)


class MPoly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[Exp, RatFunZeta] | None = None):
        self.nvars = nvars
        self.terms: Dict[Exp, RatFunZeta] = {}
        if terms:
            for e, c in terms.items():
                if len(e) != nvars:
                    raise ArityMismatch(f"exponent {e} does not have length {nvars}")
                c = _coeff(c)
                if not c.is_zero():
                    self.terms[tuple(e)] = c

    @classmethod
    def _raw(cls, nvars: int, terms: Dict[Exp, RatFunZeta]) -> "MPoly":
        obj = object.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "MPoly":
        return cls._raw(nvars, {})

    @classmethod
    def const(cls, nvars: int, c) -> "MPoly":
        c = _coeff(c)
        return cls._raw(nvars, {} if c.is_zero() else {(0,) * nvars: c})

    @classmethod
    def one(cls, nvars: int) -> "MPoly":
        return cls.const(nvars, ONE)

    @classmethod
    def var(cls, i: int, nvars: int) -> "MPoly":
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, {tuple(e): ONE})

    @classmethod
    def univariate(cls, coeffs: Sequence, var: int = 0, nvars: int = 1) -> "MPoly":
        """sum_e coeffs[e] * x_var^e."""
        terms = {}
        for e, c in enumerate(coeffs):
            c = _coeff(c)
            if not c.is_zero():
                ex = [0] * nvars
                ex[var] = e
                terms[tuple(ex)] = c
        return cls._raw(nvars, terms)

    @classmethod
    def linear(cls, nvars: int, i: int, j: int | None = None, c=None) -> "MPoly":
        """x_i - x_j, or x_i - c when ``j`` is None."""
        p = cls.var(i, nvars)
        if j is not None:
            return p - cls.var(j, nvars)
        return p - cls.const(nvars, c)

    # -- basic protocol -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def copy(self) -> "MPoly":
        return MPoly._raw(self.nvars, dict(self.terms))

    def _check(self, other: "MPoly"):
        if self.nvars != other.nvars:
            raise ArityMismatch(f"{self.nvars} vs {other.nvars} variables")

    def _lift(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            return other
        if isinstance(other, (int, RatFunZeta)) or hasattr(other, "numerator"):
            return MPoly.const(self.nvars, other)
        return NotImplemented

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if len(other.terms) > len(self.terms):
            self, other = other, self
        out = dict(self.terms)
        for e, c in other.terms.items():
            prev = out.get(e)
            if prev is None:
                out[e] = c
            else:
                s = prev + c
                if s.is_zero():
                    del out[e]
                else:
                    out[e] = s
        return MPoly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return MPoly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> "MPoly":
        c = _coeff(c)
        if c.is_zero():
            return MPoly.zero(self.nvars)
        if c.is_one():
            return self
        return MPoly._raw(self.nvars, {e: v * c for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, RatFunZeta)) or hasattr(other, "numerator"):
            return self.scale(other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return MPoly.zero(self.nvars)
        if len(self.terms) < len(other.terms):
            self, other = other, self
        out: Dict[Exp, RatFunZeta] = {}
        get = out.get
        n = self.nvars
        for e2, c2 in other.terms.items():
            if n == 1:
                d = e2[0]
                for e1, c1 in self.terms.items():
                    e = (e1[0] + d,)
                    prev = get(e)
                    out[e] = c1 * c2 if prev is None else prev + c1 * c2
            else:
                for e1, c1 in self.terms.items():
                    e = tuple([a + b for a, b in zip(e1, e2)])
                    prev = get(e)
                    out[e] = c1 * c2 if prev is None else prev + c1 * c2
        return MPoly._raw(n, {e: c for e, c in out.items() if not c.is_zero()})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "MPoly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = MPoly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- inspection ---------------------------------------------------------
    def degree(self, var: int | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        return max(e[var] for e in self.terms)

    def coeff(self, exp: Sequence[int]) -> RatFunZeta:
        return self.terms.get(tuple(exp), ZERO)

    def constant_term(self) -> RatFunZeta:
        return self.terms.get((0,) * self.nvars, ZERO)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def leading(self) -> Tuple[Exp, RatFunZeta]:
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def sorted_terms(self):
        """Terms in graded-lex order, highest first."""
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def coefficients_in(self, var: int) -> Dict[int, "MPoly"]:
        """Split as sum_e P_e * x_var^e; the P_e keep all nvars (x_var exponent 0)."""
        out: Dict[int, Dict[Exp, RatFunZeta]] = {}
        for e, c in self.terms.items():
            k = e[var]
            rest = e[:var] + (0,) + e[var + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: MPoly._raw(self.nvars, t) for k, t in out.items()}

    def map_coeffs(self, fn: Callable[[RatFunZeta], RatFunZeta]) -> "MPoly":
        out = {}
        for e, c in self.terms.items():
            v = fn(c)
            if not v.is_zero():
                out[e] = v
        return MPoly._raw(self.nvars, out)

    # -- calculus -----------------------------------------------------------
    def partial(self, var: int, order: int = 1) -> "MPoly":
        if not 0 <= var < self.nvars:
            raise ArityMismatch(f"variable index {var} out of range")
        out = {}
        for e, c in self.terms.items():
            k = e[var]
            if k < order:
                continue
            f = 1
            for i in range(order):
                f *= k - i
            ne = e[:var] + (k - order,) + e[var + 1:]
            out[ne] = c * f
        return MPoly._raw(self.nvars, out)

    def partial_zeta(self) -> "MPoly":
        return self.map_coeffs(lambda c: c.diff())

    # -- substitution -------------------------------------------------------
    def specialize(self, var: int, value) -> "MPoly":
        """Set x_var = value (a RatFunZeta); the result has nvars - 1 variables."""
        if not 0 <= var < self.nvars:
            raise ArityMismatch(f"variable index {var} out of range")
        value = _coeff(value)
        powers = [ONE]
        out: Dict[Exp, RatFunZeta] = {}
        for e, c in self.terms.items():
            k = e[var]
            while len(powers) <= k:
                powers.append(powers[-1] * value)
            ne = e[:var] + e[var + 1:]
            v = c * powers[k] if k else c
            prev = out.get(ne)
            out[ne] = v if prev is None else prev + v
        return MPoly._raw(self.nvars - 1, {e: c for e, c in out.items() if not c.is_zero()})

    def specialize_many(self, values: Mapping[int, RatFunZeta]) -> "MPoly":
        p = self
        for var in sorted(values, reverse=True):
            p = p.specialize(var, values[var])
        return p

    def evaluate(self, values: Sequence[RatFunZeta]) -> RatFunZeta:
        if len(values) != self.nvars:
            raise ArityMismatch("wrong number of values")
        p = self
        for var in range(self.nvars - 1, -1, -1):
            p = p.specialize(var, values[var])
        return p.constant_term()

    def evalf(self, point: Sequence, zeta, ctx=None):
        """Numeric evaluation with x = point and zeta = zeta (mpmath numbers)."""
        import mpmath

        ctx = ctx or mpmath.mp
        cache: Dict[RatFunZeta, object] = {}
        total = ctx.mpf(0)
        for e, c in self.terms.items():
            cv = cache.get(c)
            if cv is None:
                cv = cache[c] = c.evalf(zeta, ctx)
            term = cv
            for xv, k in zip(point, e):
                if k:
                    term *= xv ** k
            total += term
        return total

    def embed(self, nvars: int, positions: Sequence[int]) -> "MPoly":
        """Rename variable i to positions[i] inside a ring with ``nvars`` variables."""
        out = {}
        for e, c in self.terms.items():
            ne = [0] * nvars
            for i, k in enumerate(e):
                ne[positions[i]] += k
            out[tuple(ne)] = c
        return MPoly._raw(nvars, out)

    def permute(self, perm: Sequence[int]) -> "MPoly":
        """Substitute x_i -> x_perm[i]."""
        return self.embed(self.nvars, perm)

    def compose_univariate(self, var: int, image: "MPoly") -> "MPoly":
        """Substitute x_var -> image (same ambient ring)."""
        self._check(image)
        out = MPoly.zero(self.nvars)
        powers = [MPoly.one(self.nvars)]
        for k, part in sorted(self.coefficients_in(var).items()):
            while len(powers) <= k:
                powers.append(powers[-1] * image)
            out = out + part * powers[k]
        return out

    # -- division -----------------------------------------------------------
    def div_linear(self, var: int, other: int | None = None, value=None) -> "MPoly":
        """Exact quotient by (x_var - x_other) or (x_var - value)."""
        parts = self.coefficients_in(var)
        if not parts:
            return MPoly.zero(self.nvars)
        top = max(parts)
        if other is not None:
            t = MPoly.var(other, self.nvars)
        else:
            t = MPoly.const(self.nvars, value)
        x = MPoly.var(var, self.nvars)
        quotient = MPoly.zero(self.nvars)
        carry = MPoly.zero(self.nvars)
        for k in range(top, 0, -1):
            carry = parts.get(k, MPoly.zero(self.nvars)) + carry * t
            if carry:
                quotient = quotient + carry * (x ** (k - 1))
        rem = parts.get(0, MPoly.zero(self.nvars)) + carry * t
        if rem:
            raise InexactDivision(f"x{var} - {'x%d' % other if other is not None else value} "
                                  "does not divide the polynomial")
        return quotient

    def exact_div(self, divisor: "MPoly") -> "MPoly":
        """Quotient q with q * divisor == self; raises InexactDivision otherwise."""
        self._check(divisor)
        if divisor.is_zero():
            raise DivisionByZero("division by the zero polynomial")
        if not self.terms:
            return MPoly.zero(self.nvars)
        if len(divisor.terms) == 1:
            (de, dc), = divisor.terms.items()
            inv = dc.inverse()
            out = {}
            for e, c in self.terms.items():
                ne = tuple(a - b for a, b in zip(e, de))
                if ne and min(ne) < 0:
                    raise InexactDivision("monomial divisor does not divide")
                out[ne] = c * inv
            return MPoly._raw(self.nvars, out)
        lin = _as_linear(divisor)
        if lin is not None:
            scale, var, other, value = lin
            return self.div_linear(var, other, value).scale(scale.inverse())
        return _reduce_exact(self, divisor)

    # -- symmetry ----------------------------------------------------------
    def swap(self, i: int, j: int) -> "MPoly":
        perm = list(range(self.nvars))
        perm[i], perm[j] = perm[j], perm[i]
        return self.permute(perm)

    # -- display / serialization -------------------------------------------
    def __repr__(self):
        return f"MPoly({self.nvars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(f"x{i + 1}" + (f"^{k}" if k > 1 else "") for i, k in enumerate(e) if k)
            cs = str(c)
            if not mono:
                parts.append(f"({cs})")
            elif c.is_one():
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    def to_json(self) -> dict:
        return {"nvars": self.nvars,
                "terms": [{"exp": list(e), "coeff": c.to_json()} for e, c in self.sorted_terms()]}

    @classmethod
    def from_json(cls, data: dict) -> "MPoly":
        return cls(data["nvars"], {tuple(t["exp"]): RatFunZeta.from_json(t["coeff"])
                                   for t in data["terms"]})


def _as_linear(p: MPoly):
    """Recognize c*(x_i - x_j) or c*(x_i - v); return (c, i, j, v)."""
    if len(p.terms) != 2:
        return None
    items = list(p.terms.items())
    lin = [(e, c) for e, c in items if sum(e) == 1]
    if len(lin) == 2:
        (e1, c1), (e2, c2) = lin
        if c1 + c2 != ZERO:
            return None
        return c1, e1.index(1), e2.index(1), None
    if len(lin) == 1:
        (e1, c1), = lin
        (e0, c0), = [t for t in items if t[0] != e1]
        if sum(e0) != 0:
            return None
        return c1, e1.index(1), None, -c0 / c1
    return None


def _reduce_exact(a: MPoly, b: MPoly) -> MPoly:
    lead_e, lead_c = b.leading()
    inv = lead_c.inverse()
    rem = dict(a.terms)
    heap = [(-sum(e), tuple(-k for k in e)) for e in rem]
    heapq.heapify(heap)
    quotient: Dict[Exp, RatFunZeta] = {}
    bterms = list(b.terms.items())
    while heap:
        _, neg = heapq.heappop(heap)
        e = tuple(-k for k in neg)
        c = rem.get(e)
        if c is None:
            continue
        shift = tuple(x - y for x, y in zip(e, lead_e))
        if min(shift) < 0:
            raise InexactDivision("nonzero remainder in multivariate division")
        q = c * inv
        quotient[shift] = q
        for be, bc in bterms:
            te = tuple(x + y for x, y in zip(be, shift))
            prev = rem.get(te)
            v = -(bc * q)
            if prev is None:
                rem[te] = v
                heapq.heappush(heap, (-sum(te), tuple(-k for k in te)))
            else:
                s = prev + v
                if s.is_zero():
                    del rem[te]
                else:
                    rem[te] = s
    return MPoly._raw(a.nvars, quotient)


# -- free functions ---------------------------------------------------------

def mp_arith(op: str, a: MPoly, b: MPoly) -> MPoly:
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def mp_exact_div(a: MPoly, b: MPoly) -> MPoly:
    return a.exact_div(b)


def mp_partial(a: MPoly, var: int) -> MPoly:
    return a.partial(var)


def mp_partial_zeta(a: MPoly) -> MPoly:
    return a.partial_zeta()


def mp_specialize(a: MPoly, var: int, v) -> MPoly:
    return a.specialize(var, v)


def vandermonde(m: int, nvars: int | None = None, offset: int = 0) -> MPoly:
    """prod_{i<j} (x_j - x_i) over variables offset..offset+m-1."""
    nvars = m if nvars is None else nvars
    p = MPoly.one(nvars)
    for j in range(m):
        for i in range(j):
            p = p * MPoly.linear(nvars, offset + j, offset + i)
    return p


def divide_by_vandermonde(p: MPoly, variables: Sequence[int]) -> MPoly:
    """Exact quotient by prod_{i<j}(x_{v_j} - x_{v_i}) using linear factors."""
    for jj in range(len(variables)):
        for ii in range(jj):
            p = p.div_linear(variables[jj], variables[ii])
    return p


def _adjacent_images(a: MPoly):
    for i in range(a.nvars - 1):
        yield a.swap(i, i + 1)


def symmetry_check(a: MPoly) -> bool:
    return all(b == a for b in _adjacent_images(a))


def antisymmetry_check(a: MPoly) -> bool:
    neg = -a
    return all(b == neg for b in _adjacent_images(a))


def is_symmetric_in(a: MPoly, variables: Sequence[int]) -> bool:
    for i in range(len(variables) - 1):
        if a.swap(variables[i], variables[i + 1]) != a:
            return False
    return True


def power_sum_derivative_identity(m: int, k: int) -> Tuple[MPoly, MPoly]:
    """Both sides of sum_j x_j^k d^k/dx_j^k Delta = k! C(m, k+1) Delta."""
    delta = vandermonde(m)
    lhs = MPoly.zero(m)
    for j in range(m):
        xk = MPoly._raw(m, {tuple(k if i == j else 0 for i in range(m)): ONE})
        lhs = lhs + xk * delta.partial(j, k)
    rhs = delta.scale(factorial(k) * comb(m, k + 1))
    return lhs, rhs


def det_bareiss(matrix: Sequence[Sequence[MPoly]]) -> MPoly:
    """Fraction-free (Bareiss) determinant of a square matrix of MPolys."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = matrix[0][0].nvars
    m = [list(row) for row in matrix]
    sign = 1
    prev = MPoly.one(nvars)
    for k in range(n - 1):
        if m[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not m[i][k].is_zero()), None)
            if swap is None:
                return MPoly.zero(nvars)
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num if k == 0 else num.exact_div(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def det_leibniz(matrix: Sequence[Sequence[MPoly]]) -> MPoly:
    """Permutation-expansion determinant; reference for small sizes."""
    n = len(matrix)
    nvars = matrix[0][0].nvars
    total = MPoly.zero(nvars)
    for perm in permutations(range(n)):
        inv = sum(1 for i, j in combinations(range(n), 2) if perm[i] > perm[j])
        term = MPoly.one(nvars)
        for i in range(n):
            term = term * matrix[i][perm[i]]
        total = total - term if inv % 2 else total + term
    return total


# -- univariate helpers (nvars == 1), coefficients in the field Q(zeta) ------

def _udeg(p: MPoly) -> int:
    return max((e[0] for e in p.terms), default=-1)


def u_divmod(a: MPoly, b: MPoly) -> Tuple[MPoly, MPoly]:
    if a.nvars != 1 or b.nvars != 1:
        raise ArityMismatch("u_divmod needs univariate polynomials")
    if b.is_zero():
        raise DivisionByZero("division by zero polynomial")
    db = _udeg(b)
    lc_inv = b.terms[(db,)].inverse()
    rem = dict(a.terms)
    q: Dict[Exp, RatFunZeta] = {}
    dr = max((e[0] for e in rem), default=-1)
    while dr >= db:
        c = rem.pop((dr,)) * lc_inv
        shift = dr - db
        q[(shift,)] = c
        for (e,), bc in b.terms.items():
            if e == db:
                continue
            key = (e + shift,)
            v = rem.get(key, ZERO) - bc * c
            if v.is_zero():
                rem.pop(key, None)
            else:
                rem[key] = v
        dr = max((e[0] for e in rem), default=-1)
    return MPoly._raw(1, q), MPoly._raw(1, rem)


def u_monic(p: MPoly) -> MPoly:
    if p.is_zero():
        return p
    return p.scale(p.terms[(_udeg(p),)].inverse())


def u_gcd(a: MPoly, b: MPoly) -> MPoly:
    while not b.is_zero():
        a, b = b, u_divmod(a, b)[1]
    return u_monic(a) if not a.is_zero() else MPoly.one(1)


class MRat:
    """A multivariate rational function num/den over Q(zeta).

    Univariate values are reduced by a full gcd; multivariate ones only have
    scalar content pulled into the numerator.  Equality is decided by
    cross-multiplication either way.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MPoly, den: MPoly | None = None):
        den = MPoly.one(num.nvars) if den is None else den
        num._check(den)
        if den.is_zero():
            raise DivisionByZero("zero denominator in MRat")
        if num.nvars == 1 and not den.is_constant():
            g = u_gcd(num, den)
            if not g.is_constant():
                num = u_divmod(num, g)[0]
                den = u_divmod(den, g)[0]
        if den.is_constant():
            num = num.scale(den.constant_term().inverse())
            den = MPoly.one(num.nvars)
        elif num.nvars == 1:
            lc = den.terms[(_udeg(den),)]
            if not lc.is_one():
                inv = lc.inverse()
                num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def nvars(self) -> int:
        return self.num.nvars

    @classmethod
    def const(cls, nvars: int, c) -> "MRat":
        return cls(MPoly.const(nvars, c))

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def _lift(self, other):
        if isinstance(other, MRat):
            return other
        if isinstance(other, MPoly):
            return MRat(other)
        if isinstance(other, (int, RatFunZeta)) or hasattr(other, "numerator"):
            return MRat.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return MRat(self.num + other.num, self.den)
        return MRat(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return MRat(-self.num, self.den)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return MRat(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return MRat(self.num * other.den, self.den * other.num)

    def __pow__(self, k: int):
        if k < 0:
            return MRat(self.den ** (-k), self.num ** (-k))
        return MRat(self.num ** k, self.den ** k)

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return False
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def partial(self, var: int) -> "MRat":
        return MRat(self.num.partial(var) * self.den - self.num * self.den.partial(var),
                    self.den * self.den)

    def partial_zeta(self) -> "MRat":
        return MRat(self.num.partial_zeta() * self.den - self.num * self.den.partial_zeta(),
                    self.den * self.den)

    def specialize(self, var: int, value) -> "MRat":
        den = self.den.specialize(var, value)
        if den.is_zero():
            raise PoleAtPoint(f"denominator vanishes at x{var + 1} = {value}")
        return MRat(self.num.specialize(var, value), den)

    def evaluate(self, values: Sequence[RatFunZeta]) -> RatFunZeta:
        d = self.den.evaluate(values)
        if d.is_zero():
            raise PoleAtPoint("denominator vanishes at the evaluation point")
        return self.num.evaluate(values) / d

    def evalf(self, point, zeta, ctx=None):
        return self.num.evalf(point, zeta, ctx) / self.den.evalf(point, zeta, ctx)

    def as_poly(self) -> MPoly:
        if self.den.is_constant():
            return self.num.scale(self.den.constant_term().inverse())
        q = self.num.exact_div(self.den)
        return q

    def __repr__(self):
        return f"MRat(({self.num}) / ({self.den}))"

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "MRat":
        return cls(MPoly.from_json(data["num"]), MPoly.from_json(data["den"]))


def u_rat_eval(r: MRat, value: RatFunZeta) -> RatFunZeta:
    """Evaluate a reduced univariate rational function at x = value."""
    return r.evaluate([value])


def u_lcm(a: MPoly, b: MPoly) -> MPoly:
    g = u_gcd(a, b)
    return u_monic(u_divmod(a * b, g)[0])
