"""Coefficients of the annihilating operator and its exact verification.

The operator acts on Delta * T after conjugation by f * prod_j F(x_j), so
only rational data is ever needed:

    sum_j (a d_j^2 + bF d_j + cF) + m d d_zeta + e

with bF, cF built from the logarithmic derivatives of F.  The dual form for
U uses K = 1 / (F sqrt(a)) through its logarithmic derivatives.

All one-variable rational functions are :class:`MRat` values in one
variable, reduced by a gcd over Q(zeta).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Sequence, Tuple

from .errors import InexactDivision
from .kernel import (G_TERMS, XI, KIndex, a_poly, base_T, btl_closed_forms, g_between,
                     g_kernel, general_T, general_U, tau)
from .multipoly import MPoly, MRat, divide_by_vandermonde, u_lcm, vandermonde
from .scalars import ONE, ZERO, ZETA, RatFunZeta

z = ZETA
Q = Fraction


def _x() -> MPoly:
    return MPoly.var(0, 1)


def _r(c) -> MRat:
    return MRat.const(1, c)


def _inv_linear(lead, root) -> MRat:
    """1 / (lead * x - root) as a one-variable rational function."""
    return MRat(MPoly.one(1), _x().scale(lead) - root)


# -- the coefficients of the operator ---------------------------------------

def d_const() -> RatFunZeta:
    return 2 * z * (z - 1) * (z + 1) * (z + 2) * (2 * z + 1)


def b_over_a(m: int) -> MRat:
    """Partial-fraction form of b/a."""
    r = _inv_linear(1, 2 * z + 1) * ((3 * (z + 1) + m * (z - 1) * (z + 2)) / (2 * (z + 1)))
    r = r + _inv_linear(z + 2, z) * ((z + 2) * (3 * z * (z + 1) - m * (2 * z + 1) * (z - 1))
                                     / (2 * z * (z + 1)))
    r = r + _inv_linear(z + 2, z * (2 * z + 1)) * ((z + 2) * (3 * z - m * (z * z + 4 * z + 1))
                                                    / (2 * z))
    r = r + _inv_linear(1, ONE) * RatFunZeta.const(Q(3, 2))
    return r


@lru_cache(maxsize=None)
def b_poly(m: int) -> MPoly:
    r = b_over_a(m) * a_poly()
    if not r.is_polynomial():
        raise ValueError("b is not a polynomial")
    return r.as_poly()


@lru_cache(maxsize=None)
def c0_poly(m: int) -> MPoly:
    x = _x()
    c2 = RatFunZeta.const(Q(3 * (m - 2) * (3 * m - 4), 4)) * (z + 2) ** 2
    c1 = -RatFunZeta.const(Q(3 * m - 4, 2)) * (z + 2) * (2 * (2 * m - 3) * (z * z + 1)
                                                        + (7 * m - 12) * z)
    c0 = (-RatFunZeta.const(Q(2 * (2 * m * m - 5), 3)) * z ** 4
          - RatFunZeta.const(Q(7 * m * m + 66 * m - 112, 6)) * z ** 3
          + RatFunZeta.const(Q(7 * (m - 2) * (7 * m - 8), 4)) * z ** 2
          + RatFunZeta.const(Q((5 * m - 8) * (19 * m - 14), 6)) * z
          + RatFunZeta.const(Q(11 * m * m - 24 * m + 10, 3)))
    return MPoly.univariate([c0, c1, c2])


def w_rat(k: Sequence[int]) -> MRat:
    x = _x()
    k0, k1, k2, k3 = k
    one = MPoly.one(1)
    zx = x.scale(z + 2)
    total = MRat.const(1, ZERO)
    if k0 * (k0 + 1):
        total = total + MRat((x - 1) * (x - z) ** 2, x * x * (x - (2 * z + 1))) * (
            -k0 * (k0 + 1) * (2 * z + 1) ** 3)
    if k1 * (k1 + 1):
        total = total + MRat((zx - z * (2 * z + 1)) * (zx - (2 * z + 1)) ** 2, zx - z) * (
            RatFunZeta.const(-k1 * (k1 + 1)))
    if k2 * (k2 + 1):
        total = total + MRat((zx - z).scale((z + 1) * (z - 1) ** 3 * (2 * z + 1) ** 3),
                             (zx - z * (2 * z + 1)) * (zx - (2 * z + 1)) ** 2) * (
            RatFunZeta.const(k2 * (k2 + 1)))
    if k3 * (k3 + 1):
        total = total + MRat((x * x * (x - (2 * z + 1))).scale((z + 1) * (z - 1) ** 3),
                             (x - 1) * (x - z) ** 2) * RatFunZeta.const(k3 * (k3 + 1))
    return total


def f_exponents(k: Sequence[int]) -> Tuple[Fraction, ...]:
    """Exponents of (z+1), z, (z+2), (z-1), (2z+1) in f, signs included."""
    k0, k1, k2, k3 = (Q(v) for v in k)
    e1 = k2 * (k2 + 2) / 4 + k3 * (k3 + 2) / 4 - (k0 + k1) * (k2 + k3 - 1) + k2 * k3 / 2
    e2 = k1 * (k1 - 3) / 4 + k2 * (k2 - 3) / 4 + (k0 + k3) * (k1 + k2 - Q(1, 4)) - k0 * k3 / 2
    e3 = (-Q(3, 4) * k0 * (k0 + 1) - k1 * (2 * k1 + 5) / 4 - k2 * (2 * k2 + 5) / 4
          - Q(3, 4) * k3 * (k3 + 1) + (k0 + k3) * (k1 + k2) / 2 + k1 * k2 / 2)
    e4 = (k2 + k3) * (k2 + k3 - 2) / 4
    e5 = (k0 + k2) * (k0 + k2 - 2) / 4
    return e1, -e2, e3, -e4, -e5


def logf(k: Sequence[int]) -> RatFunZeta:
    """f'/f, the logarithmic zeta-derivative of the scalar prefactor."""
    e = f_exponents(k)
    bases = (z + 1, z, z + 2, z - 1, 2 * z + 1)
    out = ZERO
    for ex, base in zip(e, bases):
        if ex:
            out = out + RatFunZeta.const(ex) * base.diff() / base
    return out


def e_const(k: Sequence[int], m: int) -> RatFunZeta:
    return m * d_const() * logf(k)


def _g_at(l: int) -> MPoly:
    """G(x, xi_l) as a one-variable polynomial."""
    return g_between(1, 0, c=XI[l])


def _g_parts(l: int):
    """(G, dG/dx, dG/dzeta + dG/dy * xi_l') at y = xi_l."""
    g = g_kernel()
    v = XI[l]
    G = g.specialize(1, v)
    Gx = g.partial(0).specialize(1, v)
    Gtot = g.partial_zeta().specialize(1, v) + g.partial(1).specialize(1, v).scale(v.diff())
    return G, Gx, Gtot


def logF_x(k: Sequence[int]) -> MRat:
    out = MRat.const(1, ZERO)
    for l, kl in enumerate(k):
        if kl:
            G, Gx, _ = _g_parts(l)
            term = MRat(MPoly.one(1), _x() - XI[l]) - MRat(Gx, G)
            out = out + term * RatFunZeta.const(Q(kl, 2))
    return out


def logF_zeta(k: Sequence[int]) -> MRat:
    out = MRat.const(1, ZERO)
    for l, kl in enumerate(k):
        if kl:
            G, _, Gtot = _g_parts(l)
            dv = XI[l].diff()
            term = MRat(MPoly.const(1, -dv), _x() - XI[l]) - MRat(Gtot, G)
            out = out + term * RatFunZeta.const(Q(kl, 2))
    return out


def log_a_x() -> MRat:
    a = a_poly()
    return MRat(a.partial(0), a)


def log_a_zeta() -> MRat:
    a = a_poly()
    return MRat(a.partial_zeta(), a)


@dataclass
class OmegaCoeffs:
    k: Tuple[int, ...]
    m: int
    a: MPoly
    b: MPoly
    c0: MPoly
    W: MRat
    d: RatFunZeta
    logF_x: MRat
    logF_zeta: MRat
    logf: RatFunZeta
    e: RatFunZeta
    bF: MRat
    cF: MRat
    dual: bool = False

    @property
    def c(self) -> MRat:
        return self.W + self.c0


def conjugated(a: MPoly, b: MPoly, c: MRat, m: int, d: RatFunZeta, lx: MRat, lz: MRat):
    """(bX, cX) for conjugation by a factor X with log-derivatives lx, lz."""
    ar = MRat(a)
    bX = ar * lx * 2 + b
    cX = ar * (lx * lx + lx.partial(0)) + lx * b + c + lz * (m * d)
    return bX, cX


@lru_cache(maxsize=None)
def build_coeffs(kidx: KIndex, dual: bool = False) -> OmegaCoeffs:
    k, m = kidx.k, kidx.m
    a = a_poly()
    b = b_poly(m)
    c0 = c0_poly(m)
    W = w_rat(k)
    d = d_const()
    lx, lz = logF_x(k), logF_zeta(k)
    if dual:
        lx = -lx - log_a_x() * Q(1, 2)
        lz = -lz - log_a_zeta() * Q(1, 2)
    lf = logf(k)
    bF, cF = conjugated(a, b, W + c0, m, d, lx, lz)
    return OmegaCoeffs(k, m, a, b, c0, W, d, lx, lz, lf, m * d * lf, bF, cF, dual)


# -- applying the operator ----------------------------------------------------

def _denominator_poly(exps: Sequence[int]) -> MPoly:
    g = MPoly.one(1)
    for l, e in enumerate(exps):
        if e:
            g = g * _g_at(l) ** e
    return g


def _clear(r: MRat, L: MPoly) -> MPoly:
    """r * L as a polynomial (L a multiple of the denominator of r)."""
    return (MRat(L) * r).as_poly()


def _at(p: MPoly, j: int, m: int) -> MPoly:
    return p.embed(m, [j])


def omega_residual(numerator: MPoly, g: MPoly, coeffs: OmegaCoeffs) -> MPoly:
    """Residual of the conjugated operator on Delta * numerator / prod_j g(x_j).

    Returned multiplied through by prod_j L(x_j), with L the common
    denominator of the one-variable coefficients; zero iff the equation holds.
    """
    m = coeffs.m
    P = vandermonde(m) * numerator if m else numerator
    if m == 0:
        return P.scale(coeffs.e)
    a, bF, cF, d, e = coeffs.a, coeffs.bF, coeffs.cF, coeffs.d, coeffs.e
    gr = MRat(g)
    s = MRat(g.partial(0), g)
    sp = s.partial(0)
    sz = MRat(g.partial_zeta(), g)
    B = bF - MRat(a) * s * 2
    C = cF - bF * s + MRat(a) * (s * s - sp) - sz * (m * d)
    L = u_lcm(B.den, C.den)
    La, LB, LC = L * a, _clear(B, L), _clear(C, L)
    Ls = [_at(L, j, m) for j in range(m)]
    total = MPoly.zero(m)
    for j in range(m):
        part = (_at(La, j, m) * P.partial(j, 2) + _at(LB, j, m) * P.partial(j)
                + _at(LC, j, m) * P)
        for i in range(m):
            if i != j:
                part = part * Ls[i]
        total = total + part
    rest = P.partial_zeta().scale(m * d) + P.scale(e)
    for i in range(m):
        rest = rest * Ls[i]
    return total + rest


def _numerator(r: MRat, g: MPoly) -> MPoly:
    """r * prod_j g(x_j) as a polynomial."""
    m = r.nvars
    G = MPoly.one(m)
    for j in range(m):
        G = G * _at(g, j, m)
    try:
        # usually den divides G, and the cofactor is small
        return r.num * G.exact_div(r.den)
    except InexactDivision:
        return (r * MRat(G)).as_poly()


def apply_omega(kidx: KIndex) -> MPoly:
    g = _denominator_poly(kidx.kminus)
    num = _numerator(general_T(kidx), g)
    return omega_residual(num, g, build_coeffs(kidx))


def apply_omega_dual(kidx: KIndex) -> MPoly:
    g = _denominator_poly(kidx.kplus)
    num = _numerator(general_U(kidx), g)
    return omega_residual(num, g, build_coeffs(kidx, dual=True))


# -- Taylor data of the base polynomial --------------------------------------

def taylor_data(n: int) -> Tuple[RatFunZeta, RatFunZeta, RatFunZeta, RatFunZeta]:
    """(alpha, beta, gamma, delta) read off base_T(n) by specializing to 0."""
    T = base_T(n)
    nv = 2 * n
    one = T.specialize_many({i: ZERO for i in range(1, nv)})  # only x_1 left
    alpha = one.coeff((0,))
    beta = one.coeff((1,))
    gamma = one.coeff((2,))
    if nv >= 2:
        two = T.specialize_many({i: ZERO for i in range(2, nv)})
        delta = two.coeff((1, 1))
    else:
        delta = ZERO
    return alpha, beta, gamma, delta


def taylor_check(n: int) -> bool:
    return taylor_data(n) == btl_closed_forms(n)


def btl_recursion_check(n: int) -> bool:
    """T_n(x_1..x_{2n-2}, 0, 0) = zeta^{2n-2} prod_j (2 zeta + 1 - x_j) T_{n-1}."""
    if n < 2:
        return True
    T = base_T(n)
    nv = 2 * n
    # the zeros go into one variable of each Cauchy block
    spec = T.specialize_many({n - 1: ZERO, nv - 1: ZERO})
    rhs = MPoly.const(nv - 2, z ** (2 * n - 2))
    for j in range(nv - 2):
        rhs = rhs * (MPoly.const(nv - 2, 2 * z + 1) - MPoly.var(j, nv - 2))
    return spec == rhs * base_T(n - 1)


# -- constant-term lemma --------------------------------------------------------

SYMBOLS = ("a", "b", "c", "c3", "alpha", "beta", "gamma", "delta", "eps")


def _sym(m: int, name: str) -> MPoly:
    return MPoly.var(m + SYMBOLS.index(name), m + len(SYMBOLS))


def ct_lemma_sides(m: int):
    """Constant terms of sum_j f(x_j) d_j^2 (Delta P) / Delta and its first-order
    analogue, next to the claimed closed forms.

    f = a + b x + c x^2 + c3 x^3 and P = alpha + beta p1 + gamma p2 + delta e2
    + eps p3, where the c3 and eps terms must not contribute.
    """
    nv = m + len(SYMBOLS)
    s = {name: _sym(m, name) for name in SYMBOLS}
    xs = [MPoly.var(j, nv) for j in range(m)]
    p1 = sum(xs, MPoly.zero(nv))
    p2 = sum((x * x for x in xs), MPoly.zero(nv))
    p3 = sum((x * x * x for x in xs), MPoly.zero(nv))
    e2 = MPoly.zero(nv)
    for i in range(m):
        for j in range(i + 1, m):
            e2 = e2 + xs[i] * xs[j]
    P = s["alpha"] + s["beta"] * p1 + s["gamma"] * p2 + s["delta"] * e2 + s["eps"] * p3
    DP = vandermonde(m, nv) * P
    second = MPoly.zero(nv)
    first = MPoly.zero(nv)
    for j, x in enumerate(xs):
        f = s["a"] + s["b"] * x + s["c"] * x * x + s["c3"] * x * x * x
        second = second + f * DP.partial(j, 2)
        first = first + f * DP.partial(j)
    cols = list(range(m))

    def ct(p):
        q = divide_by_vandermonde(p, cols)
        return MPoly(nv, {e: c for e, c in q.terms.items() if not any(e[:m])})

    a, b, c = s["a"], s["b"], s["c"]
    al, be, ga, de = s["alpha"], s["beta"], s["gamma"], s["delta"]
    rhs2 = (c * al).scale(2 * comb(m, 3)) + (b * be).scale(2 * comb(m, 2)) \
        + (a * ga).scale(2 * m * m) - (a * de).scale(2 * comb(m, 2))
    rhs1 = (b * al).scale(comb(m, 2)) + (a * be).scale(m)
    return ct(second), rhs2, ct(first), rhs1


def ct_lemma_check(m: int) -> bool:
    l2, r2, l1, r1 = ct_lemma_sides(m)
    return l2 == r2 and l1 == r1


def zj_constant_term_check(n: int) -> bool:
    """The k = 0 constant-term equation at x = 0 forces e = 0."""
    m = 2 * n
    al, be, ga, de = btl_closed_forms(n)
    a = a_poly()
    b = b_poly(m)
    c0 = c0_poly(m)
    ev = lambda p: p.evaluate([ZERO])
    lhs = ((comb(m, 3) * ev(a.partial(0, 2)) + comb(m, 2) * ev(b.partial(0)) + m * ev(c0)) * al
           + (2 * comb(m, 2) * ev(a.partial(0)) + m * ev(b)) * be
           + ev(a) * (2 * m * m * ga - 2 * comb(m, 2) * de)
           + m * d_const() * al.diff())
    return lhs.is_zero()


# -- the recursion at the half-periods ---------------------------------------------

def _eval(r: MRat, v: RatFunZeta) -> RatFunZeta:
    return r.evaluate([v])


def _bracket(co: OmegaCoeffs, v: RatFunZeta) -> RatFunZeta:
    m = co.m
    return (comb(m, 3) * co.a.partial(0, 2).evaluate([v])
            + comb(m, 2) * _eval(co.bF.partial(0), v)
            + m * _eval(co.cF, v) + co.e)


def eer_combination(kidx: KIndex, l: int, dual: bool = False) -> RatFunZeta:
    """The eliminated-epsilon combination at x = xi_l; zero when consistent.

    The companion index is (k - e_l, m + 1), or (k + e_l, m + 1) for the dual.
    """
    m = kidx.m
    step = [0, 0, 0, 0]
    step[l] = 1 if dual else -1
    other = kidx.shifted(step, 1)
    co = build_coeffs(kidx, dual)
    ct = build_coeffs(other, dual)
    v = XI[l]
    return (m + 1) * _bracket(co, v) - m * _bracket(ct, v)


def eer_beta_combination(kidx: KIndex, l: int, dual: bool = False) -> RatFunZeta:
    m = kidx.m
    step = [0, 0, 0, 0]
    step[l] = 1 if dual else -1
    other = kidx.shifted(step, 1)
    co = build_coeffs(kidx, dual)
    ct = build_coeffs(other, dual)
    v = XI[l]
    ap = co.a.partial(0).evaluate([v])
    lhs = (m + 1) * (2 * comb(m, 2) * ap + m * _eval(co.bF, v))
    rhs = m * (2 * comb(m + 1, 2) * ap + (m + 1) * _eval(ct.bF, v)
               - (m + 1) * co.d * v.diff())
    return lhs - rhs


def recursion_check_eer(kidx: KIndex, l: int) -> bool:
    if kidx.m < 1:
        raise ValueError("the recursion needs m >= 1")
    return eer_combination(kidx, l).is_zero() and eer_beta_combination(kidx, l).is_zero()
