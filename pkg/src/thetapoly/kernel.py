"""The kernel G, the half-period values, and the T/U polynomial families.

Everything here is exact.  The base polynomial T_n is a row-scaled Cauchy
determinant; sigma-hat is rebuilt by interpolation from its defining action on
the family (x - a) * prod_j (x - b_j) G(x, b_j); the general T_n^(k) and the
duals U_n^(k) come from the two-block construction with some variables
specialized to half-period values xi_l.

Specializing the sigma-transformed block to repeated xi values is a confluent
limit of P(y) / Delta(y).  Instead of dividing first and substituting after
(which needs the fully expanded block in all 2N variables), the division and
the substitution are fused: for a group of r equal values v the j-th variable
of the group is hit with the functional p -> (d/dy)^j p |_{y=v}, which turns
Delta into prod_j j! and leaves the symmetric quotient evaluated at v.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Sequence, Tuple

from .errors import (InconsistentSystem, InexactDivision, PoleAtSpecialization,
                     SingularInterpolation)
from .multipoly import MPoly, MRat, det_bareiss, divide_by_vandermonde, vandermonde
from .scalars import ONE, ZERO, ZETA, RatFunZeta

z = ZETA

XI: Tuple[RatFunZeta, ...] = (
    2 * z + 1,
    z / (z + 2),
    z * (2 * z + 1) / (z + 2),
    ONE,
)
# eta_1 is the point at infinity; it is kept only as a marker.
INFINITY = None
ETA = (ZERO, INFINITY, (2 * z + 1) / (z + 2), z)

# G(x, y) as {(deg_x, deg_y): coefficient}
G_TERMS: Dict[Tuple[int, int], RatFunZeta] = {
    (2, 1): z + 2, (1, 2): z + 2,
    (2, 0): -z, (0, 2): -z,
    (1, 1): -2 * (z * z + 3 * z + 1),
    (1, 0): z * (2 * z + 1), (0, 1): z * (2 * z + 1),
}


@dataclass(frozen=True)
class XiTable:
    xi: Tuple[RatFunZeta, ...] = XI
    eta: tuple = ETA


def xi_table() -> XiTable:
    return XiTable()


@dataclass(frozen=True)
class KIndex:
    """Lattice index k together with the number m of free variables."""

    k: Tuple[int, int, int, int]
    m: int = 0

    def __post_init__(self):
        k = tuple(int(v) for v in self.k)
        if len(k) != 4:
            raise ValueError("k must have exactly four entries")
        object.__setattr__(self, "k", k)
        if self.m < 0:
            raise ValueError("m must be non-negative")
        if (sum(k) + self.m) % 2:
            raise ValueError(f"|k| + m must be even, got k={k}, m={self.m}")

    @property
    def size(self) -> int:
        return sum(self.k)

    @property
    def n(self) -> int:
        return (sum(self.k) + self.m) // 2

    @property
    def kplus(self) -> Tuple[int, ...]:
        return tuple(max(v, 0) for v in self.k)

    @property
    def kminus(self) -> Tuple[int, ...]:
        return tuple(max(-v, 0) for v in self.k)

    @property
    def block_n(self) -> int:
        """Size parameter of the underlying base polynomial, n + |k^-|."""
        return self.n + sum(self.kminus)

    @property
    def n_norm(self) -> int:
        return n_norm(self.k)

    def shifted(self, l: Sequence[int], dm: int = 0) -> "KIndex":
        return KIndex(tuple(a + b for a, b in zip(self.k, l)), self.m + dm)


def n_norm(k: Sequence[int]) -> int:
    """Twice sum_j |k_j + 1/2|."""
    return sum(abs(2 * v + 1) for v in k)


def xi_power(k: Sequence[int]) -> List[RatFunZeta]:
    """The value list xi^k: xi_0 repeated k_0 times, then xi_1, ..."""
    out = []
    for l, c in enumerate(k):
        out.extend([XI[l]] * c)
    return out


# -- G and a ------------------------------------------------------------------

def g_kernel() -> MPoly:
    return MPoly(2, dict(G_TERMS))


def g_value(x: RatFunZeta, y: RatFunZeta) -> RatFunZeta:
    return sum((c * x ** i * y ** j for (i, j), c in G_TERMS.items()), ZERO)


def g_between(nvars: int, i: int, j: int | None = None, c: RatFunZeta | None = None) -> MPoly:
    """G(x_i, x_j) or G(x_i, c) as a polynomial in ``nvars`` variables."""
    terms: Dict[tuple, RatFunZeta] = {}
    for (di, dj), coef in G_TERMS.items():
        e = [0] * nvars
        e[i] += di
        if j is not None:
            e[j] += dj
            v = coef
        else:
            v = coef * c ** dj
        key = tuple(e)
        terms[key] = terms.get(key, ZERO) + v
    return MPoly(nvars, terms)


def g_partial_x() -> MPoly:
    return g_kernel().partial(0)


def a_poly() -> MPoly:
    """a(x) as the product of its four linear factors."""
    x = MPoly.var(0, 1)
    return ((x - (2 * z + 1)) * (x - 1) * (x.scale(z + 2) - z)
            * (x.scale(z + 2) - z * (2 * z + 1)))


def a_poly_from_roots() -> MPoly:
    x = MPoly.var(0, 1)
    p = MPoly.const(1, (z + 2) ** 2)
    for v in XI:
        p = p * (x - v)
    return p


# -- base polynomials ---------------------------------------------------------

@lru_cache(maxsize=None)
def base_T(n: int) -> MPoly:
    """T_n^(0,0,0,0) in 2n variables from the row-scaled Cauchy determinant."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n == 0:
        return MPoly.one(0)
    nv = 2 * n
    gs = [[g_between(nv, i, n + j) for j in range(n)] for i in range(n)]
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            p = MPoly.one(nv)
            for l in range(n):
                if l != j:
                    p = p * gs[i][l]
            row.append(p)
        rows.append(row)
    det = det_bareiss(rows) if n > 1 else rows[0][0]
    det = divide_by_vandermonde(det, list(range(n)))
    return divide_by_vandermonde(det, list(range(n, 2 * n)))


# -- linear algebra over Q(zeta) ---------------------------------------------

def _row_reduce(rows: List[List[RatFunZeta]], ncols: int):
    """Reduced row echelon form in place; returns pivot columns."""
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if not rows[i][c].is_zero()), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [v * inv for v in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return pivots


def solve_matrix(A: List[List[RatFunZeta]], B: List[List[RatFunZeta]]) -> List[List[RatFunZeta]]:
    """Solve A X = B for square nonsingular A."""
    n = len(A)
    aug = [list(A[i]) + list(B[i]) for i in range(n)]
    piv = _row_reduce(aug, n)
    if len(piv) < n:
        raise SingularInterpolation("singular system")
    return [row[n:] for row in aug]


# -- sigma-hat ----------------------------------------------------------------

def _poly_coeffs(p: MPoly, length: int) -> List[RatFunZeta]:
    out = [ZERO] * length
    for (e,), c in p.terms.items():
        if e >= length:
            raise ValueError("polynomial degree exceeds the basis")
        out[e] = c
    return out


def hs_family(n: int, bs: Sequence) -> Tuple[MPoly, MPoly, MPoly, MPoly]:
    """(x*P, sigma(x*P), P, sigma(P)) for P = prod_j (x - b_j) G(x, b_j)."""
    x = MPoly.var(0, 1)
    P = MPoly.one(1)
    for b in bs:
        b = RatFunZeta.const(b)
        P = P * (x - b) * g_between(1, 0, c=b)
    h0 = x * (x - (2 * z + 1)) * (x.scale(z + 2) - 3 * z)
    h1 = (x.scale(z + 2) - z) * (MPoly.const(1, 2 * z + 1) - x.scale(3))
    return x * P, P * h0, P, P * h1


def _sample_tuples(n: int):
    """Deterministic stream of distinct small rational tuples of length n-1."""
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53]
    i = 0
    while True:
        yield tuple(primes[(i + j) % len(primes)] + (i // len(primes)) for j in range(n - 1))
        i += 1


class SigmaOp:
    """sigma-hat_n as a (3n+1) x (3n-1) matrix on the monomial basis.

    The defining family only spans a subspace of the polynomials of degree
    <= 3n-2 (of dimension 2n in every case checked).  On that subspace the
    operator is unique; on the complement spanned by the non-pivot monomials
    it is set to zero.  ``annihilators`` cut out the subspace, and
    :meth:`check_domain` rejects inputs that leave it, so the zero extension
    never influences a result.
    """

    def __init__(self, n: int, matrix: List[List[RatFunZeta]], annihilators=(), rank=None):
        self.n = n
        self.matrix = matrix  # matrix[f][e]: coefficient of x^f in sigma(x^e)
        self.annihilators = [list(a) for a in annihilators]
        self.rank = self.in_dim if rank is None else rank
        self._images: Dict[int, MPoly] = {}
        self._functionals: Dict[tuple, RatFunZeta] = {}

    @property
    def in_dim(self) -> int:
        return 3 * self.n - 1

    @property
    def out_dim(self) -> int:
        return 3 * self.n + 1

    def image(self, e: int) -> MPoly:
        """sigma(x^e) as a univariate polynomial."""
        p = self._images.get(e)
        if p is None:
            if not 0 <= e < self.in_dim:
                raise ValueError(f"sigma_{self.n} is defined on degrees < {self.in_dim}, got {e}")
            p = MPoly.univariate([self.matrix[f][e] for f in range(self.out_dim)])
            self._images[e] = p
        return p

    def in_domain(self, p: MPoly, var: int = 0) -> bool:
        """True when every x_var-slice of p lies in the spanned subspace."""
        for ann in self.annihilators:
            acc: Dict[tuple, RatFunZeta] = {}
            for e, c in p.terms.items():
                k = e[var]
                if k >= self.in_dim:
                    return False
                w = ann[k]
                if w.is_zero():
                    continue
                key = e[:var] + e[var + 1:]
                acc[key] = acc.get(key, ZERO) + c * w
            if any(not v.is_zero() for v in acc.values()):
                return False
        return True

    def check_domain(self, p: MPoly, var: int = 0):
        if not self.in_domain(p, var):
            raise InconsistentSystem(f"input leaves the domain of sigma_{self.n} in x{var + 1}")

    def apply(self, p: MPoly) -> MPoly:
        """Apply to a univariate polynomial."""
        self.check_domain(p)
        out = MPoly.zero(1)
        for (e,), c in p.terms.items():
            out = out + self.image(e).scale(c)
        return out

    def apply_var(self, p: MPoly, var: int, check: bool = True) -> MPoly:
        """Apply in the variable x_var, coefficientwise in the others."""
        if check:
            self.check_domain(p, var)
        out: Dict[tuple, RatFunZeta] = {}
        for e, c in p.terms.items():
            img = self.image(e[var])
            for (f,), s in img.terms.items():
                ne = e[:var] + (f,) + e[var + 1:]
                v = c * s
                prev = out.get(ne)
                out[ne] = v if prev is None else prev + v
        return MPoly(p.nvars, {e: c for e, c in out.items() if not c.is_zero()})

    def functional(self, e: int, order: int, value: RatFunZeta) -> RatFunZeta:
        """(d/dx)^order sigma(x^e) evaluated at x = value."""
        key = (e, order, value)
        v = self._functionals.get(key)
        if v is None:
            img = self.image(e)
            v = (img.partial(0, order) if order else img).evaluate([value])
            self._functionals[key] = v
        return v

    def to_json(self) -> dict:
        return {"n": self.n, "rank": self.rank,
                "matrix": [[c.to_json() for c in row] for row in self.matrix]}


@lru_cache(maxsize=None)
def sigma_hat(n: int, extra_checks: int = 3) -> SigmaOp:
    """Interpolate sigma-hat_n from its action on the defining family."""
    if n < 1:
        raise ValueError("sigma_hat needs n >= 1")
    dim = 3 * n - 1
    out_dim = 3 * n + 1
    inputs: List[List[RatFunZeta]] = []
    outputs: List[List[RatFunZeta]] = []
    stream = _sample_tuples(n)
    stale = 0
    # keep sampling until the rank has not grown for a while
    while len(inputs) < dim and stale < 2 * dim + 4:
        xP, sxP, P, sP = hs_family(n, next(stream))
        grew = False
        for src, img in ((xP, sxP), (P, sP)):
            v = _poly_coeffs(src, dim)
            trial = [list(r) for r in inputs] + [list(v)]
            if len(_row_reduce(trial, dim)) > len(inputs):
                inputs.append(v)
                outputs.append(_poly_coeffs(img, out_dim))
                grew = True
        stale = 0 if grew else stale + 1
    rank = len(inputs)
    if rank == 0:
        raise SingularInterpolation(f"no usable samples for n={n}")
    echelon = [list(r) for r in inputs]
    pivots = _row_reduce(echelon, dim)
    free = [c for c in range(dim) if c not in pivots]
    annihilators = []
    for f in free:
        ann = [ZERO] * dim
        ann[f] = ONE
        for i, pc in enumerate(pivots):
            ann[pc] = -echelon[i][f]
        annihilators.append(ann)
    A = [list(v) for v in inputs]
    B = [list(w) for w in outputs]
    for c in free:
        A.append([ONE if i == c else ZERO for i in range(dim)])
        B.append([ZERO] * out_dim)
    X = solve_matrix(A, B)
    matrix = [[X[e][f] for e in range(dim)] for f in range(out_dim)]
    op = SigmaOp(n, matrix, annihilators, rank)
    for _ in range(extra_checks):
        xP, sxP, P, sP = hs_family(n, next(stream))
        if op.apply(xP) != sxP or op.apply(P) != sP:
            raise InconsistentSystem(f"sigma_{n} interpolation does not reproduce the defining family")
    return op


def hs_check(n: int, a, bs: Sequence) -> bool:
    """Check sigma_n((x - a) P_b) against the right side of the defining identity."""
    op = sigma_hat(n)
    xP, sxP, P, sP = hs_family(n, bs)
    a = RatFunZeta.const(a)
    return op.apply(xP - P.scale(a)) == sxP - sP.scale(a)


# -- the two-block function ---------------------------------------------------

def block_T(n: int, split: int) -> MRat:
    """T(x_1..x_split; x_split+1..x_2n), built literally: Delta*T_n, sigma on the
    second block, exact division by both Vandermonde factors."""
    if not 0 <= split <= 2 * n:
        raise ValueError("split must lie in [0, 2n]")
    nv = 2 * n
    p = vandermonde(nv) * base_T(n)
    if split < nv:
        op = sigma_hat(n)
        for v in range(split, nv):
            p = op.apply_var(p, v)
    p = divide_by_vandermonde(p, list(range(split)))
    p = divide_by_vandermonde(p, list(range(split, nv)))
    return MRat(p)


def _groups(values: Sequence[RatFunZeta]):
    """Derivative order per position and the group constant for a confluent list."""
    orders = []
    const = ONE
    counts: Dict[RatFunZeta, int] = {}
    for i, v in enumerate(values):
        c = counts.get(v, 0)
        orders.append(c)
        counts[v] = c + 1
        const = const * factorial(c)
        for j in range(i):
            if values[j] != v:
                const = const * (v - values[j])
    return orders, const


def _contract(p: MPoly, first: int, values: Sequence[RatFunZeta], op: SigmaOp) -> MPoly:
    """Apply the confluent functionals to variables first..first+len(values)-1.

    Returns a polynomial in the remaining leading ``first`` variables.
    """
    orders, _ = _groups(values)
    q = len(values)
    # p is antisymmetric in these variables and the domain is a linear
    # subspace, so one variable settles membership for all of them
    if q:
        op.check_domain(p, first)
    out: Dict[tuple, RatFunZeta] = {}
    for e, c in p.terms.items():
        s = c
        for j in range(q):
            s = s * op.functional(e[first + j], orders[j], values[j])
            if s.is_zero():
                break
        if s.is_zero():
            continue
        key = e[:first]
        prev = out.get(key)
        out[key] = s if prev is None else prev + s
    return MPoly(first, {e: c for e, c in out.items() if not c.is_zero()})


def _block_specialized(N: int, first_vals: Sequence[RatFunZeta], free: int,
                       second_vals: Sequence[RatFunZeta], free_in_second: bool) -> MPoly:
    """Numerator of the two-block function with blocks specialized.

    Without free_in_second the blocks are (x_1..x_free, first_vals; second_vals);
    otherwise (first_vals; x_1..x_free, second_vals).  Returns the polynomial
    in the free variables, already divided by both Vandermonde factors.
    """
    q = len(second_vals)
    base = base_T(N)
    nb = 2 * N
    # variable layout of base: free x's, first_vals, second_vals
    u0 = free
    values = {u0 + i: v for i, v in enumerate(first_vals)}
    p = base.specialize_many(values) if values else base
    # p now has variables: x_1..x_free, y_1..y_q  (2N - len(first_vals) in total)
    nv = free + q
    assert p.nvars == nv, (p.nvars, nv)
    ys = list(range(free, nv))
    # multiply by one linear factor at a time: far cheaper than expanding the
    # product first and doing a single large multiplication
    if free_in_second:
        # second block is (x, y): Delta(x, y) and products against the constants
        lins = [MPoly.linear(nv, j, i) for j in range(nv) for i in range(j)]
        lins += [MPoly.linear(nv, s, c=w) for s in range(nv) for w in first_vals]
    else:
        lins = [MPoly.linear(nv, j, i) for j in ys for i in range(free, j)]
        lins += [MPoly.linear(nv, j, i) for j in ys for i in range(free)]
        lins += [MPoly.linear(nv, j, c=w) for j in ys for w in first_vals]
    for f in lins:
        p = p * f
    op = sigma_hat(N) if (q or free_in_second) else None
    if q:
        p = _contract(p, free, second_vals, op)
    _, const = _groups(second_vals)
    if free_in_second:
        if free:
            op.check_domain(p, 0)
        for i in range(free):
            p = op.apply_var(p, i, check=False)
        p = divide_by_vandermonde(p, list(range(free)))
        for v in second_vals:
            for i in range(free):
                # divide by (v - x_i)
                p = -p.div_linear(i, value=v)
    return p.scale(const.inverse())


def _g_cross(kminus: Sequence[int], kplus: Sequence[int]) -> RatFunZeta:
    out = ONE
    for i in range(4):
        for j in range(4):
            e = kminus[i] * kplus[j]
            if e:
                g = g_value(XI[i], XI[j])
                if g.is_zero():
                    raise PoleAtSpecialization(f"G(xi_{i}, xi_{j}) vanishes identically")
                out = out * g ** e
    return out


def _g_free(m: int, exps: Sequence[int]) -> MPoly:
    den = MPoly.one(m)
    for j in range(m):
        for i in range(4):
            if exps[i]:
                den = den * g_between(m, j, c=XI[i]) ** exps[i]
    return den


@lru_cache(maxsize=None)
def general_T(kidx: KIndex) -> MRat:
    """T_n^(k) as a rational function of the m free variables."""
    kp, km = kidx.kplus, kidx.kminus
    N = kidx.block_n
    m = kidx.m
    num = _block_specialized(N, xi_power(kp), m, xi_power(km), False)
    s = sum(km)
    scale = RatFunZeta.const((-1) ** comb(s, 2)) / (2 ** s * _g_cross(km, kp))
    return MRat(num.scale(scale), _g_free(m, km))


@lru_cache(maxsize=None)
def general_U(kidx: KIndex) -> MRat:
    """The dual function U_n^(k)."""
    kp, km = kidx.kplus, kidx.kminus
    N = kidx.block_n
    m = kidx.m
    if N == 0:
        num = MPoly.one(m)
    else:
        num = _block_specialized(N, xi_power(kp), m, xi_power(km), True)
    s = sum(kp)
    scale = RatFunZeta.const((-1) ** comb(s, 2)) / (2 ** s * _g_cross(km, kp))
    return MRat(num.scale(scale), _g_free(m, kp))


def tau(k: Sequence[int]) -> RatFunZeta:
    """t^(k) = T_{|k|/2}^(k) with no free variables."""
    k = tuple(k)
    if sum(k) % 2:
        raise ValueError("|k| must be even")
    r = general_T(KIndex(k, 0))
    return r.num.constant_term() / r.den.constant_term()


def t_poly(kidx: KIndex) -> MPoly:
    """T_n^(k) for k >= 0, where it is a polynomial."""
    r = general_T(kidx)
    if not r.is_polynomial():
        raise ValueError(f"T for {kidx.k} is not polynomial")
    return r.as_poly()


def specialize_xi(r: MRat, l: Sequence[int]) -> MRat:
    """Set the trailing |l| variables to xi^l."""
    vals = xi_power(l)
    m = r.nvars - len(vals)
    out = r
    for i in range(len(vals) - 1, -1, -1):
        out = out.specialize(m + i, vals[i])
    return out


def btl_closed_forms(n: int) -> Tuple[RatFunZeta, RatFunZeta, RatFunZeta, RatFunZeta]:
    """(alpha_n, beta_n, gamma_n, delta_n) of the second-order Taylor data at 0."""
    s = z ** (n * (n - 1))
    t = 2 * z + 1
    alpha = s * t ** (n * (n - 1))
    if n == 1:
        return alpha, ZERO, ZERO, ZERO
    beta = -(n - 1) * s * t ** (n * n - n - 1)
    gamma = RatFunZeta.const((n - 1) * (n - 2) // 2) * s * t ** ((n + 1) * (n - 2))
    delta = (n - 1) ** 2 * s * t ** ((n + 1) * (n - 2))
    return alpha, beta, gamma, delta


# -- shift and duality laws -----------------------------------------------------

def _unit(l: int) -> Tuple[int, int, int, int]:
    e = [0, 0, 0, 0]
    e[l] = 1
    return tuple(e)


def shift_law_T(k: Sequence[int], l: int, m: int) -> bool:
    """T^(k + e_l) with m variables against T^(k) with m + 1 variables at x = xi_l."""
    small = general_T(KIndex(tuple(k), m + 1))
    big = general_T(KIndex(tuple(a + b for a, b in zip(k, _unit(l))), m))
    return big == small.specialize(m, XI[l])


def shift_law_U(k: Sequence[int], l: int, m: int) -> bool:
    """U^(k - e_l) with m variables against U^(k) with m + 1 variables at x = xi_l."""
    big = general_U(KIndex(tuple(k), m + 1))
    small = general_U(KIndex(tuple(a - b for a, b in zip(k, _unit(l))), m))
    return small == big.specialize(m, XI[l])


def _side_factor(m: int, first: Sequence[int], second: Sequence[int]) -> MPoly:
    """prod_j prod_i (x_j - xi_i)^first_i G(x_j, xi_i)^second_i."""
    out = MPoly.one(m)
    for j in range(m):
        for i in range(4):
            if first[i]:
                out = out * MPoly.linear(m, j, c=XI[i]) ** first[i]
            if second[i]:
                out = out * g_between(m, j, c=XI[i]) ** second[i]
    return out


def duality_sides(kidx: KIndex) -> Tuple[MPoly, MPoly]:
    """Both sides of the duality relation between T and U (polynomials in x)."""
    m = kidx.m
    kp, km = kidx.kplus, kidx.kminus
    lhs = (MRat(_side_factor(m, kp, km) * vandermonde(m)) * general_T(kidx)).as_poly()
    op = sigma_hat(kidx.block_n)
    for v in range(m):
        lhs = op.apply_var(lhs, v)
    s = sum(kidx.k)
    rhs = (MRat(_side_factor(m, km, kp) * vandermonde(m)) * general_U(kidx)).as_poly()
    # s may be negative; binomial(s, 2) = s (s - 1) / 2 still applies
    rhs = rhs.scale(RatFunZeta.const((-1) ** (s * (s - 1) // 2) * Fraction(2) ** s))
    return lhs, rhs


def duality_check(kidx: KIndex) -> bool:
    lhs, rhs = duality_sides(kidx)
    return lhs == rhs
