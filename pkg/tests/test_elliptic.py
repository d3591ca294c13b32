import mpmath
import pytest

from thetapoly.errors import NearSingularity
from thetapoly.elliptic import (CATALOGUE, EllipticCtx, default_grid, eval_core, parse_tau, pdl_values,
                                psi_factorization_ratio, schroedinger_grid, sigma_relation_squared, spread,
                                ukl_membership, verify_identity, verify_schroedinger)
from thetapoly.kernel import XI, KIndex


@pytest.fixture(scope="module")
def ctx():
    return EllipticCtx("1.2i", 40)


@pytest.fixture(scope="module")
def ctx2():
    return EllipticCtx("0.3+1.1i", 40)


def series_theta(x, q, mp, terms=60):
    # Jacobi triple product: (q;q) theta(x;q) = sum (-1)^n q^(n(n-1)/2) x^n
    s = 0
    for n in range(-terms, terms + 1):
        s += (-1) ** n * q ** (n * (n - 1) // 2) * x ** n
    return s


def test_parse_tau():
    assert parse_tau("1.2i") == 1.2j
    assert parse_tau("0.3+1.1i") == complex(0.3, 1.1)
    assert parse_tau("-0.5+2i") == complex(-0.5, 2)
    with pytest.raises(ValueError):
        EllipticCtx("-1i")


def test_truncation_rule(ctx):
    assert abs(ctx.p) ** (2 * ctx.trunc) < mpmath.mpf(10) ** (-(ctx.prec + 10))


def test_theta_against_series(ctx):
    mp = ctx.mp
    q = ctx.p ** 2
    for x in (mp.mpc("0.3", "0.1"), mp.mpc("-1.7", "0.4"), mp.mpc("0.05", "-0.2")):
        lhs = ctx.qpoch(q, q) * ctx.theta(x, q)
        assert abs(lhs - series_theta(x, q, mp)) < mp.mpf(10) ** (-35)


def test_theta_symmetries(ctx):
    mp = ctx.mp
    q = mp.mpf("0.05")
    x = mp.mpc("0.3", "0.1")
    assert ctx.theta(1, q) == 0
    assert abs(ctx.theta(q / x, q) - ctx.theta(x, q)) < mp.mpf(10) ** (-38)
    assert abs(ctx.theta(1 / x, q) + ctx.theta(x, q) / x) < mp.mpf(10) ** (-38)


def test_x_special_values(ctx):
    mp = ctx.mp
    assert abs(ctx.x(mp.mpf(1) / 3)) < mp.mpf(10) ** (-35)
    assert abs(ctx.x(mp.mpf(1) / 2) - 1) < mp.mpf(10) ** (-35)


def test_zeta_two_ways(ctx):
    # the defining product against the product formula for 2 zeta + 1
    mp = ctx.mp
    q = ctx.p ** 2
    w = ctx.omega
    th = ctx.theta
    alt = ((th(-ctx.p * w, q) * th(w, q)) ** 2 / (th(-w, q) * th(ctx.p * w, q)) ** 2 - 1) / 2
    assert abs(ctx.zeta() - alt) < mp.mpf(10) ** (-35)


def test_psi_antiperiodic(ctx):
    for z in default_grid(ctx, 5):
        assert abs(ctx.psi(z + 1) + ctx.psi(z)) < abs(ctx.psi(z)) * 1e-35


def test_pss_twenty_points(ctx):
    assert verify_identity("pss", ctx, default_grid(ctx, 20)) < 10.0 ** (-(ctx.prec - 5))


@pytest.mark.parametrize("name", CATALOGUE)
def test_catalogue(ctx2, name):
    grid = default_grid(ctx2, 4)
    tol = 1e-6 if name in ("ops", "xp", "phd", "ld", "ld2", "pdn", "xds", "xsd", "fd", "zdl", "pdl") else 1e-30
    assert verify_identity(name, ctx2, grid) < tol


def test_pdl_needs_the_correction(ctx):
    # without the chi D term the second log-derivative is far from constant
    mp = ctx.mp
    grid = default_grid(ctx, 6)
    raw = [mp.diff(lambda s: mp.log(ctx.psi(s)), z, 2) for z in grid]
    assert spread(raw, mp) > 1e-2
    assert spread(pdl_values(ctx, grid), mp) < 1e-6


def test_xi_matches_numeric_half_periods(ctx):
    for l in range(4):
        assert abs(ctx.x(ctx.halfperiods[l]) - ctx.xi(l)) < 1e-30


def test_eval_core(ctx):
    z = ctx.mp.mpc("0.2", "0.3")
    assert eval_core("psi", z, ctx=ctx) == ctx.psi(z)
    with pytest.raises(ValueError):
        eval_core("nope", z, ctx=ctx)


@pytest.mark.parametrize("k", [(1, 0, 0, 0), (2, 1, 0, 0), (0, 1, 0, 0)])
def test_spanning_element_membership(ctx, k):
    assert ukl_membership(ctx, KIndex(k, 1)) < 1e-25


def test_psi_factorization(ctx):
    assert psi_factorization_ratio(ctx, KIndex((2, 1, 0, 0), 1)) < 1e-25


def test_sigma_relation_up_to_sign(ctx):
    assert sigma_relation_squared(ctx, 1, 2, []) < 1e-25
    assert sigma_relation_squared(ctx, 2, 3, [5]) < 1e-25


def test_schroedinger_small(ctx):
    ki = KIndex((1, 0, 0, 0), 1)
    grid = schroedinger_grid(ctx, 1, 4)
    assert verify_schroedinger(ki, ctx, grid).passed
    assert not verify_schroedinger(ki, ctx, grid, with_potential=False).passed


def test_near_singularity(ctx):
    ki = KIndex((1, 0, 0, 0), 1)
    with pytest.raises(NearSingularity):
        verify_schroedinger(ki, ctx, [[ctx.mp.mpf(1) / 6 + ctx.mp.mpf("0.001")]])
