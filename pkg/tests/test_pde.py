from fractions import Fraction
from math import comb

import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from thetapoly.kernel import XI, KIndex, a_poly, base_T
from thetapoly.multipoly import MPoly, MRat
from thetapoly.pde import (apply_omega, apply_omega_dual, b_over_a, b_poly, build_coeffs, c0_poly,
                           ct_lemma_check, ct_lemma_sides, d_const, eer_beta_combination, eer_combination,
                           f_exponents, log_a_x, logf, recursion_check_eer, taylor_check, taylor_data,
                           btl_recursion_check, w_rat, zj_constant_term_check)
from thetapoly.scalars import ONE, ZERO, ZETA as z, RatFunZeta


def test_trivial_index():
    co = build_coeffs(KIndex((0, 0, 0, 0), 2))
    assert co.logF_x.is_zero() and co.logf.is_zero() and co.e.is_zero()
    assert w_rat((0, 0, 0, 0)).is_zero()
    assert co.d == d_const()


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_residue_of_b_over_a_at_one(m):
    x = MPoly.var(0, 1)
    r = b_over_a(m) * MRat(x - 1)
    assert r.evaluate([ONE]) == RatFunZeta.const(Fraction(3, 2))


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_c0_constant_term(m):
    # the constant (in x) coefficient at zeta = 0
    assert c0_poly(m).constant_term().eval(0) == Fraction(11 * m * m - 24 * m + 10, 3)


@pytest.mark.parametrize("m", [1, 2, 3, 6])
def test_b_degree(m):
    b = b_poly(m)
    assert b.degree(0) <= 3
    assert MRat(b) == b_over_a(m) * MRat(a_poly())


def test_dual_log_derivative():
    # logK_x + logF_x + a'/(2a) = 0
    for k in [(1, 0, 0, 0), (0, 2, -1, 1)]:
        m = (sum(k) % 2)
        ki = KIndex(k, m)
        co, du = build_coeffs(ki), build_coeffs(ki, dual=True)
        assert (du.logF_x + co.logF_x + log_a_x() * Fraction(1, 2)).is_zero()


def test_f_exponents_zero_at_origin():
    assert all(e == 0 for e in f_exponents((0, 0, 0, 0)))
    assert logf((0, 0, 0, 0)).is_zero()


@given(st.tuples(*[st.integers(-4, 4)] * 4))
@settings(max_examples=30)
def test_f_exponents_are_quadratic(k):
    # second differences in each coordinate are constant
    for j in range(4):
        def at(t):
            kk = list(k)
            kk[j] = t
            return f_exponents(kk)
        d2 = [a - 2 * b + c for a, b, c in zip(at(k[j] + 1), at(k[j]), at(k[j] - 1))]
        d2b = [a - 2 * b + c for a, b, c in zip(at(k[j] + 2), at(k[j] + 1), at(k[j]))]
        assert d2 == d2b


@pytest.mark.parametrize("k,m", [((0, 0, 0, 0), 2), ((1, 0, 0, 0), 1), ((0, 0, 0, 0), 4),
                                 ((-1, 0, 0, 0), 1), ((1, 1, 0, 0), 2), ((2, 1, 0, 0), 1),
                                 ((0, -1, 0, 1), 2)])
def test_operator_annihilates(k, m):
    ki = KIndex(k, m)
    assert apply_omega(ki).is_zero()
    assert apply_omega_dual(ki).is_zero()


def test_broken_operator_is_detected():
    # perturbing e must leave a nonzero residual
    from thetapoly.pde import _denominator_poly, _numerator, omega_residual
    from thetapoly.kernel import general_T
    import dataclasses

    ki = KIndex((2, 1, 0, 0), 1)
    co = build_coeffs(ki)
    bad = dataclasses.replace(co, e=co.e + 1)
    g = _denominator_poly(ki.kminus)
    num = _numerator(general_T(ki), g)
    assert not omega_residual(num, g, bad).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3])
def test_taylor_data(n):
    assert taylor_check(n)
    assert zj_constant_term_check(n)


def test_taylor_initial():
    assert taylor_data(1) == (ONE, ZERO, ZERO, ZERO)
    al, be, _, _ = taylor_data(2)
    assert al == z ** 2 * (2 * z + 1) ** 2 and be == -z ** 2 * (2 * z + 1)


@pytest.mark.parametrize("n", [2, 3])
def test_btl_recursion(n):
    assert btl_recursion_check(n)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_ct_lemma(m):
    assert ct_lemma_check(m)


def test_ct_lemma_m2_has_no_c_alpha_term():
    _, rhs2, _, _ = ct_lemma_sides(2)
    assert comb(2, 3) == 0
    nv = 2 + 9
    c_alpha = [0] * nv
    c_alpha[2 + 2] = 1
    c_alpha[2 + 4] = 1
    assert rhs2.coeff(tuple(c_alpha)).is_zero()


def test_ct_lemma_brute_force_m3():
    # sympy expansion of the same constant term for generic jets
    m = 3
    xs = sp.symbols("x1:4")
    a, b, c, al, be, ga, de = sp.symbols("a b c alpha beta gamma delta")
    Dl = sp.prod([xs[j] - xs[i] for j in range(m) for i in range(j)])
    P = al + be * sum(xs) + ga * sum(v ** 2 for v in xs) + de * (xs[0] * xs[1] + xs[0] * xs[2] + xs[1] * xs[2])
    expr = sum((a + b * v + c * v ** 2) * sp.diff(Dl * P, v, 2) for v in xs)
    q = sp.cancel(expr / Dl)
    ct = sp.expand(q).subs({v: 0 for v in xs})
    rhs = 2 * comb(m, 3) * c * al + 2 * comb(m, 2) * b * be + 2 * m * m * a * ga - 2 * comb(m, 2) * a * de
    assert sp.expand(ct - rhs) == 0


@pytest.mark.parametrize("k,m,l", [((0, 0, 0, 0), 2, 0), ((1, 0, 0, 0), 1, 3), ((1, 1, 0, 0), 2, 1),
                                   ((2, 1, 0, 0), 1, 0), ((-1, 0, 0, 0), 1, 1)])
def test_recursion_at_half_periods(k, m, l):
    ki = KIndex(k, m)
    assert eer_combination(ki, l).is_zero()
    assert eer_beta_combination(ki, l).is_zero()
    assert eer_combination(ki, l, dual=True).is_zero()
    assert recursion_check_eer(ki, l)
