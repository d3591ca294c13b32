"""High-precision numerics for the theta-function side.

Every analytic identity relating psi, x, zeta, chi, phi and friends is checked
here at sample points; derivatives come from :func:`mpmath.diff`, which runs
its finite differences at raised working precision.  Each
:class:`EllipticCtx` owns a private mpmath context, so several contexts with
different precisions can coexist (one per thread, say).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Sequence, Tuple

from mpmath.ctx_mp import MPContext

from .errors import NearSingularity
from .kernel import G_TERMS, XI, ETA, KIndex, general_T, hs_family, sigma_hat
from .multipoly import MPoly, MRat
from .scalars import RatFunZeta


def parse_tau(text: str) -> complex:
    """Parse 'a+bi' (decimal literals) into a Python complex."""
    s = text.strip().replace(" ", "").replace("I", "i").replace("j", "i")
    if not s.endswith("i"):
        return complex(float(s), 0.0)
    return complex(s[:-1] + "j") if s[:-1] not in ("", "+", "-") else complex(s[:-1] + "1j")


class EllipticCtx:
    """Numerical evaluation context at a fixed tau and working precision."""

    def __init__(self, tau, prec: int = 50):
        self.mp = MPContext()
        self.mp.dps = prec
        self.prec = prec
        mp = self.mp
        self.tau = mp.mpc(tau) if not isinstance(tau, str) else mp.mpc(parse_tau(tau))
        if mp.im(self.tau) <= 0:
            raise ValueError("tau must lie in the upper half-plane")
        self.p = mp.exp(1j * mp.pi * self.tau)
        self.omega = mp.exp(2j * mp.pi / 3)
        # |p|^(2 N) < 10^-(prec + 10)
        ap = abs(self.p)
        self.trunc = int(mp.ceil((prec + 10) / (-2 * mp.log10(ap)))) + 1
        self.halfperiods = (mp.mpf(0), self.tau / 2, self.tau / 2 + mp.mpf(1) / 2, mp.mpf(1) / 2)
        self._cache: Dict[tuple, object] = {}

    # -- q-products ----------------------------------------------------------
    def _p(self, tau=None):
        if tau is None:
            return self.p
        return self.mp.exp(1j * self.mp.pi * tau)

    def _n_for(self, q) -> int:
        aq = abs(q)
        if aq == 0:
            return 1
        n = int(self.mp.ceil((self.prec + 10) / (-self.mp.log10(aq)))) + 1
        return max(n, 1)

    def qpoch(self, x, q, n=None):
        n = self._n_for(q) if n is None else n
        out = self.mp.mpf(1)
        qj = self.mp.mpf(1)
        for _ in range(n):
            out *= 1 - x * qj
            qj *= q
        return out

    def theta(self, x, q):
        """theta(x; q) = (x; q)_inf (q/x; q)_inf, truncated."""
        if abs(q) >= 1:
            raise ValueError("|q| must be below 1")
        return self.qpoch(x, q) * self.qpoch(q / x, q)

    def thetas(self, xs, q):
        out = self.mp.mpf(1)
        for x in xs:
            out *= self.theta(x, q)
        return out

    # -- the named functions ---------------------------------------------------
    def e(self, z, scale=1):
        return self.mp.exp(2j * self.mp.pi * scale * z)

    def psi(self, z, tau=None):
        mp = self.mp
        tau = self.tau if tau is None else tau
        p = self._p(tau)
        q = p * p
        u = self.e(z)
        pre = mp.exp(1j * mp.pi * tau / 12) * self.qpoch(q, q) * mp.exp(-1j * mp.pi * z)
        return pre * self.thetas((u, p * u, -p * u), q)

    def x(self, z, tau=None):
        tau = self.tau if tau is None else tau
        p = self._p(tau)
        q = p * p
        w = self.omega
        u = self.e(z)
        num = self.theta(-p * w, q) ** 2 * self.thetas((w * u, w / u), q)
        den = self.theta(-w, q) ** 2 * self.thetas((p * w * u, p * w / u), q)
        return num / den

    def x_inv(self, z, tau=None):
        """1 / x(z), finite at the poles of x."""
        tau = self.tau if tau is None else tau
        p = self._p(tau)
        q = p * p
        w = self.omega
        u = self.e(z)
        num = self.theta(-w, q) ** 2 * self.thetas((p * w * u, p * w / u), q)
        den = self.theta(-p * w, q) ** 2 * self.thetas((w * u, w / u), q)
        return num / den

    def zeta(self, tau=None):
        tau = self.tau if tau is None else tau
        key = ("zeta", tau)
        v = self._cache.get(key)
        if v is None:
            p = self._p(tau)
            q = p * p
            w = self.omega
            v = w ** 2 * self.thetas((-1, -p * w), q) / self.thetas((-p, -w), q)
            self._cache[key] = v
        return v

    def chi(self, tau=None):
        mp = self.mp
        tau = self.tau if tau is None else tau
        p = self._p(tau)
        q = p * p
        return 4 * mp.pi ** 2 * p * self.qpoch(q, q) ** 4 * self.theta(-1, q) * self.theta(-self.omega, q) ** 3

    def phi(self, z, tau=None):
        mp = self.mp
        tau = self.tau if tau is None else tau
        p = self._p(tau)
        q6 = p ** 6
        u = self.e(z, 3)
        pre = 1j / (3 * mp.pi) * self.qpoch(-q6, q6) ** 2 / self.qpoch(q6, q6) ** 2
        return pre * self.theta(u, q6) / self.theta(-u, q6)

    def Mn(self, n: int, z, tau=None):
        tau = self.tau if tau is None else tau
        p = self._p(tau)
        q = p * p
        u = self.e(z)
        w = self.omega
        return (self.mp.exp(-2j * self.mp.pi * z) * self.theta(u * u, q)
                * self.thetas((w * p * u, w * p / u), q) ** (3 * n - 2))

    def Phi(self, k: Sequence[int], z, tau=None):
        mp = self.mp
        tau = self.tau if tau is None else tau
        p = self._p(tau)
        q6 = p ** 6
        u = self.e(z, 3)
        ph = mp.exp(-3j * mp.pi * z)
        f0 = ph * self.theta(u, q6)
        f1 = self.theta(p ** 3 * u, q6)
        f2 = self.theta(-p ** 3 * u, q6)
        f3 = ph * self.theta(-u, q6)
        return f0 ** k[0] * f1 ** k[1] * f2 ** k[2] * f3 ** k[3]

    def xi(self, l: int, tau=None):
        """xi_l through the exact formula evaluated at zeta(tau)."""
        return XI[l].evalf(self.zeta(tau), self.mp)

    def G(self, x, y, tau=None):
        zt = self.zeta(tau)
        out = 0
        for (i, j), c in G_TERMS.items():
            out += c.evalf(zt, self.mp) * x ** i * y ** j
        return out

    def a(self, x, tau=None):
        zt = self.zeta(tau)
        out = (zt + 2) ** 2
        for l in range(4):
            out *= x - XI[l].evalf(zt, self.mp)
        return out

    def E(self, x, m: int, tau=None):
        """The half-integer power factor; principal branches."""
        mp = self.mp
        out = mp.mpf(1)
        for l in range(3):
            out *= mp.power(x - self.xi(l, tau), mp.mpf(1 - m) / 2)
        return out * mp.sqrt(x - self.xi(3, tau))

    def F(self, x, k, tau=None):
        mp = self.mp
        out = mp.mpf(1)
        for l in range(4):
            if k[l]:
                out *= mp.power((x - self.xi(l, tau)) / self.G(x, self.xi(l, tau), tau),
                                mp.mpf(k[l]) / 2)
        return out

    def V(self, k, z, tau=None):
        """The modified potential sum_j k_j (k_j + 1) / phi(z - gamma_j)^2."""
        tau = self.tau if tau is None else tau
        gam = (0, tau / 2, tau / 2 + self.mp.mpf(1) / 2, self.mp.mpf(1) / 2)
        out = 0
        for j in range(4):
            if k[j] * (k[j] + 1):
                out += k[j] * (k[j] + 1) / self.phi(z - gam[j], tau) ** 2
        return out

    def rat(self, r: RatFunZeta, tau=None):
        return r.evalf(self.zeta(tau), self.mp)

    def mrat(self, r, xs, tau=None):
        return r.evalf(xs, self.zeta(tau), self.mp)

    def Psi(self, kidx: KIndex, zs, tau=None):
        """Phi * prod psi^m E F * Delta T, with principal branches."""
        mp = self.mp
        m = kidx.m
        xs = [self.x(z, tau) for z in zs]
        out = mp.mpf(1)
        for z, x in zip(zs, xs):
            out *= (self.Phi(kidx.k, z, tau) * self.psi(z, tau) ** m
                    * self.E(x, m, tau) * self.F(x, kidx.k, tau))
        for j in range(m):
            for i in range(j):
                out *= xs[j] - xs[i]
        return out * self.mrat(general_T(kidx), xs, tau)

    # -- singularity guard -----------------------------------------------------
    def distance_to_lattice(self, z) -> float:
        """Distance from z to (1/6)Z + (tau/2)Z."""
        mp = self.mp
        t2 = self.tau / 2
        b = mp.im(z) / mp.im(t2)
        best = None
        for bi in (mp.floor(b) - 1, mp.floor(b), mp.floor(b) + 1, mp.floor(b) + 2):
            w = z - bi * t2
            a = mp.nint(mp.re(w) * 6)
            for ai in (a - 1, a, a + 1):
                d = abs(w - ai / 6)
                best = d if best is None or d < best else best
        return float(best)

    def check_point(self, z, margin: float = 0.02):
        if self.distance_to_lattice(z) < margin:
            raise NearSingularity(f"z = {z} lies within {margin} of the lattice (1/6)Z + (tau/2)Z")


NAMES = ("psi", "x", "zeta", "chi", "phi", "Mn", "Phi", "E", "Psi", "V")


def eval_core(name: str, *args, ctx: EllipticCtx):
    if name not in NAMES:
        raise ValueError(f"unknown function {name!r}")
    return getattr(ctx, name)(*args)


@dataclass(frozen=True)
class NumFn:
    name: str
    eval: Callable


def numfn(name: str, ctx: EllipticCtx) -> NumFn:
    return NumFn(name, getattr(ctx, name))


# -- identity catalogue ------------------------------------------------------------

def default_grid(ctx: EllipticCtx, count: int = 12, seed: int = 7) -> List:
    """Deterministic pseudo-random points in one period cell, away from the lattice."""
    import random

    rng = random.Random(seed)
    mp = ctx.mp
    pts = []
    while len(pts) < count:
        a = rng.uniform(0.02, 0.98)
        b = rng.uniform(0.05, 0.95)
        z = mp.mpf(a) + mp.mpf(b) * ctx.tau / 2 + mp.mpf(rng.uniform(-0.1, 0.1))
        if ctx.distance_to_lattice(z) > 0.03:
            pts.append(z)
    return pts


def _rel(lhs, rhs, mp):
    scale = max(abs(lhs), abs(rhs), mp.mpf(10) ** (-mp.dps))
    return abs(lhs - rhs) / scale


def _d(ctx, f, x, n=1):
    return ctx.mp.diff(f, x, n)


def _pqp(ctx, z):
    mp = ctx.mp
    r1 = _rel(ctx.psi(z + 1), -ctx.psi(z), mp)
    r2 = _rel(ctx.psi(-z), -ctx.psi(z), mp)
    r3 = _rel(ctx.psi(z + ctx.tau), mp.exp(-3j * mp.pi * (ctx.tau + 2 * z)) * ctx.psi(z), mp)
    return max(r1, r2, r3)


def _ops(ctx, z):
    mp = ctx.mp
    lhs = 12j * mp.pi * _d(ctx, lambda t: ctx.psi(z, t), ctx.tau)
    rhs = _d(ctx, ctx.psi, z, 2)
    return _rel(lhs, rhs, mp)


def _pss(ctx, z):
    third = ctx.mp.mpf(1) / 3
    return _rel(ctx.psi(z), ctx.psi(z + third) + ctx.psi(z - third), ctx.mp)


def _xd(ctx, z):
    mp = ctx.mp
    w = z * mp.mpf("0.61") + mp.mpf("0.137") + ctx.tau * mp.mpf("0.11")
    p = ctx.p
    q = p * p
    om = ctx.omega
    ez, ew = ctx.e(z), ctx.e(w)
    pre = -(om * ctx.thetas((p, p * om), q) * ctx.theta(-p * om, q) ** 2
            / (ctx.e(z) * ctx.theta(-om, q) ** 2))
    num = ctx.thetas((ez * ew, ez / ew), q)
    den = ctx.thetas((p * om * ez, p * om / ez, p * om * ew, p * om / ew), q)
    return _rel(ctx.x(z) - ctx.x(w), pre * num / den, mp)


def _xp_rhs(ctx, z):
    mp = ctx.mp
    p = ctx.p
    q = p * p
    om = ctx.omega
    ez = ctx.e(z)
    pre = (2j * mp.pi * om * ctx.qpoch(q, q) ** 2 * ctx.thetas((p, p * om), q)
           * ctx.theta(-p * om, q) ** 2 / ctx.theta(-om, q) ** 2)
    return pre * mp.exp(-2j * mp.pi * z) * ctx.theta(ez * ez, q) / ctx.thetas((p * om * ez, p * om / ez), q) ** 2


def _xp(ctx, z):
    return _rel(_d(ctx, ctx.x, z), _xp_rhs(ctx, z), ctx.mp)


def _xv(ctx, z=None):
    """Half-period values against the exact formulas; z is ignored."""
    mp = ctx.mp
    zt = ctx.zeta()
    third = mp.mpf(1) / 3
    worst = mp.mpf(0)
    for l in range(4):
        worst = max(worst, _rel(ctx.x(ctx.halfperiods[l]), XI[l].evalf(zt, mp), mp))
    for l in (0, 2, 3):
        num = ctx.x(ctx.halfperiods[l] + third)
        val = ETA[l].evalf(zt, mp)
        worst = max(worst, abs(num - val) / max(abs(val), 1))
    # eta_1 is a pole of x
    worst = max(worst, abs(ctx.x_inv(ctx.halfperiods[1] + third)))
    return worst


def _zp(ctx, z=None):
    mp = ctx.mp
    p = ctx.p
    q = p * p
    om = ctx.omega
    zt = ctx.zeta()
    th = ctx.theta
    r1 = _rel(zt + 1, -th(p, q) * th(-p * om, q) / (th(-p, q) * th(p * om, q)), mp)
    r2 = _rel(zt - 1, th(p, q) * th(p * om, q) * th(om, q) ** 2
              / (th(-p, q) * th(-p * om, q) * th(-om, q) ** 2), mp)
    r3 = _rel(zt + 2, p * th(-1, q) * th(-om, q) * th(om, q) ** 2
              / (th(-p, q) * th(-p * om, q) * th(p * om, q) ** 2), mp)
    r4 = _rel(2 * zt + 1, (th(-p * om, q) * th(om, q)) ** 2 / (th(-om, q) * th(p * om, q)) ** 2, mp)
    return max(r1, r2, r3, r4)


def _phd(ctx, z=None):
    return abs(_d(ctx, ctx.phi, ctx.mp.mpf(0)) - 1)


def _pdn_value(ctx):
    mp = ctx.mp
    q = ctx.p ** 2
    return -4j * mp.pi * mp.exp(1j * mp.pi * ctx.tau / 12) * ctx.qpoch(q, q) ** 3 / ctx.theta(-1, q)


def _pdn(ctx, z=None):
    return _rel(_d(ctx, ctx.psi, ctx.mp.mpf(0)), _pdn_value(ctx), ctx.mp)


def _ld(ctx, z=None):
    mp = ctx.mp
    q = ctx.p ** 2
    t = mp.mpf(1) / 3
    lhs = _d(ctx, ctx.psi, t) / ctx.psi(t)
    rhs = -2j * mp.pi * ctx.qpoch(q, q) ** 2 * ctx.theta(-ctx.omega, q) / ctx.thetas((-1, ctx.omega), q)
    return _rel(lhs, rhs, mp)


def _ld2(ctx, z=None):
    mp = ctx.mp
    p = ctx.p
    q = p * p
    t = mp.mpf(1) / 3 + ctx.tau / 2
    lhs = _d(ctx, ctx.psi, t) / ctx.psi(t) + 3j * mp.pi
    rhs = (-2j * mp.pi * ctx.omega ** 2 * ctx.qpoch(q, q) ** 2 * ctx.theta(-p * ctx.omega, q)
           / ctx.thetas((-p, ctx.omega), q))
    return _rel(lhs, rhs, mp)


def _zfac(ctx):
    zt = ctx.zeta()
    return zt * (zt + 1) * (zt + 2)


def _xds(ctx, z):
    x = ctx.x(z)
    lhs = _d(ctx, ctx.x, z) ** 2
    rhs = -ctx.chi() / (2 * _zfac(ctx)) * ctx.a(x)
    return _rel(lhs, rhs, ctx.mp)


def _xsd(ctx, z):
    x = ctx.x(z)
    lhs = _d(ctx, ctx.x, z, 2)
    ap = _d(ctx, ctx.a, x)
    rhs = -ctx.chi() / (4 * _zfac(ctx)) * ap
    return _rel(lhs, rhs, ctx.mp)


def _fd(ctx, z):
    mp = ctx.mp
    zt = ctx.zeta()
    x = ctx.x(z)
    lhs = (2 * _d(ctx, ctx.psi, z) / ctx.psi(z) * _d(ctx, ctx.x, z)
           - 12j * mp.pi * _d(ctx, lambda t: ctx.x(z, t), ctx.tau))
    B = (x - 1) * ((zt + 2) * x + 2 * zt + 1)
    rhs = -ctx.chi() / (zt + 2) * B
    return _rel(lhs, rhs, mp)


def _zdl(ctx, z=None):
    mp = ctx.mp
    zt = ctx.zeta()
    lhs = 12j * mp.pi * _d(ctx, lambda t: ctx.zeta(t), ctx.tau)
    return _rel(lhs, ctx.chi() * (zt - 1) * (2 * zt + 1), mp)


def pdl_values(ctx, grid) -> List:
    """(log psi)'' - chi D / (zeta + 2) along the grid; constant in z."""
    mp = ctx.mp
    zt = ctx.zeta()
    out = []
    for z in grid:
        x = ctx.x(z)
        lp = _d(ctx, lambda s: mp.log(ctx.psi(s)), z, 2)
        D = ((x - zt) * (x * (zt + 2) + zt * (2 * zt + 1)) ** 2
             / ((x - (2 * zt + 1)) * ((zt + 2) * x - zt) * ((zt + 2) * x - zt * (2 * zt + 1))))
        out.append(lp - ctx.chi() / (zt + 2) * D)
    return out


def spread(values, mp) -> float:
    mean = sum(values) / len(values)
    dev = max(abs(v - mean) for v in values)
    return float(dev / max(abs(mean), mp.mpf(10) ** (-mp.dps)))


PFL_K = ((1, 2, 0, 3), (2, 0, 1, 0), (0, 1, 3, 1), (-2, 1, 0, -3))


def _pfl(ctx, z):
    from .pde import w_rat

    mp = ctx.mp
    zt = ctx.zeta()
    x = ctx.x(z)
    worst = mp.mpf(0)
    for k in PFL_K:
        lhs = ctx.V(k, z)
        rhs = ctx.chi() / (2 * _zfac(ctx)) * w_rat(k).evalf([x], zt, mp)
        worst = max(worst, _rel(lhs, rhs, mp))
    return worst


@dataclass(frozen=True)
class Identity:
    name: str
    fn: Callable
    uses_fd: bool
    pointwise: bool = True


IDENTITIES: Dict[str, Identity] = {i.name: i for i in [
    Identity("pqp", _pqp, False),
    Identity("ops", _ops, True),
    Identity("pss", _pss, False),
    Identity("xd", _xd, False),
    Identity("xp", _xp, True),
    Identity("xv", _xv, False, False),
    Identity("zp", _zp, False, False),
    Identity("phd", _phd, True, False),
    Identity("ld", _ld, True, False),
    Identity("ld2", _ld2, True, False),
    Identity("pdn", _pdn, True, False),
    Identity("xds", _xds, True),
    Identity("xsd", _xsd, True),
    Identity("fd", _fd, True),
    Identity("zdl", _zdl, True, False),
    Identity("pfl", _pfl, False),
]}

CATALOGUE = tuple(IDENTITIES) + ("pdl",)

FD_TOL = 1e-6


def algebraic_tol(ctx: EllipticCtx) -> float:
    return 10.0 ** (-(ctx.prec - 10))


def tolerance(name: str, ctx: EllipticCtx) -> float:
    if name == "pdl" or IDENTITIES[name].uses_fd:
        return FD_TOL
    return algebraic_tol(ctx)


def verify_identity(name: str, ctx: EllipticCtx, grid=None) -> float:
    """Maximum relative residual of the named identity (a spread for 'pdl')."""
    grid = default_grid(ctx, 10) if grid is None else grid
    if name == "pdl":
        return spread(pdl_values(ctx, grid), ctx.mp)
    ident = IDENTITIES[name]
    if not ident.pointwise:
        return float(ident.fn(ctx))
    return float(max(ident.fn(ctx, z) for z in grid))


def identity_report(ctx: EllipticCtx, names=CATALOGUE, grid=None) -> List[dict]:
    grid = default_grid(ctx, 10) if grid is None else grid
    out = []
    for name in names:
        r = verify_identity(name, ctx, grid)
        tol = tolerance(name, ctx)
        out.append({"identity": name, "tau": str(ctx.tau), "grid_size": len(grid),
                    "max_residual": r, "tolerance": tol, "pass": r < tol})
    return out


# -- checks on the assembled functions -----------------------------------------------

def ukl_function(ctx: EllipticCtx, kidx: KIndex):
    """z -> M_n(z) prod_l (x - xi_l)^k_l T(x) for one free variable."""
    if kidx.m != 1:
        raise ValueError("one free variable expected")
    T = general_T(kidx)
    n = kidx.n
    k = kidx.k

    def f(z, tau=None):
        x = ctx.x(z, tau)
        v = ctx.Mn(n, z, tau) * ctx.mrat(T, [x], tau)
        for l in range(4):
            if k[l]:
                v *= (x - ctx.xi(l, tau)) ** k[l]
        return v

    return f


def ukl_membership(ctx: EllipticCtx, kidx: KIndex, grid=None) -> float:
    """Quasi-periodicity, oddness and the three-term relation of the spanning element."""
    mp = ctx.mp
    f = ukl_function(ctx, kidx)
    grid = default_grid(ctx, 6) if grid is None else grid
    n = kidx.n
    third = mp.mpf(1) / 3
    worst = mp.mpf(0)
    for z in grid:
        v = f(z)
        worst = max(worst, _rel(f(z + 1), v, mp))
        worst = max(worst, _rel(f(z + ctx.tau), mp.exp(-6j * mp.pi * n * (ctx.tau + 2 * z)) * v, mp))
        worst = max(worst, _rel(f(-z), -v, mp))
        s = v + f(z + third) + f(z - third)
        worst = max(worst, abs(s) / max(abs(v), abs(f(z + third)), abs(f(z - third))))
    return float(worst)


def psi_factorization_ratio(ctx: EllipticCtx, kidx: KIndex, grid=None) -> float:
    """Spread of (spanning element) / Psi squared; constant in z up to branch signs."""
    mp = ctx.mp
    f = ukl_function(ctx, kidx)
    grid = default_grid(ctx, 6) if grid is None else grid
    vals = []
    for z in grid:
        vals.append((f(z) / ctx.Psi(kidx, [z])) ** 2)
    return spread(vals, mp)


def sigma_relation_squared(ctx: EllipticCtx, n: int, a, bs, grid=None) -> float:
    """sigma f = (M_n / sqrt a) sigma-hat (f / M_n), compared after squaring."""
    mp = ctx.mp
    xP, sxP, P, sP = hs_family(n, bs)
    a = RatFunZeta.const(a)
    src = xP - P.scale(a)
    img = sxP - sP.scale(a)
    zt = ctx.zeta()
    third = mp.mpf(1) / 3
    grid = default_grid(ctx, 6) if grid is None else grid

    def f(z):
        return ctx.Mn(n, z) * src.evalf([ctx.x(z)], zt, mp)

    worst = mp.mpf(0)
    for z in grid:
        x = ctx.x(z)
        lhs = (f(z + third) - f(z - third)) ** 2 * ctx.a(x)
        rhs = (ctx.Mn(n, z) * img.evalf([x], zt, mp)) ** 2
        worst = max(worst, _rel(lhs, rhs, mp))
    return float(worst)


# -- Schroedinger equation ---------------------------------------------------------------

def _log_factors(ctx: EllipticCtx, kidx: KIndex):
    """Single-valued factors h and exponents e with Phi^-1 Psi = prod h^e."""
    k, m = kidx.k, kidx.m
    T = general_T(kidx)
    facs = []
    for j in range(m):
        facs.append((m, lambda zs, tau, j=j: ctx.psi(zs[j], tau)))
        for l in range(4):
            ex = ctx.mp.mpf(1 - m) / 2 if l < 3 else ctx.mp.mpf(1) / 2
            ex += ctx.mp.mpf(k[l]) / 2
            facs.append((ex, lambda zs, tau, j=j, l=l: ctx.x(zs[j], tau) - ctx.xi(l, tau)))
            if k[l]:
                facs.append((-ctx.mp.mpf(k[l]) / 2,
                             lambda zs, tau, j=j, l=l: ctx.G(ctx.x(zs[j], tau), ctx.xi(l, tau), tau)))

    def dt(zs, tau):
        xs = [ctx.x(z, tau) for z in zs]
        v = ctx.mrat(T, xs, tau)
        for j in range(m):
            for i in range(j):
                v *= xs[j] - xs[i]
        return v

    facs.append((1, dt))
    return facs


def schroedinger_ratio(ctx: EllipticCtx, kidx: KIndex, zs, with_potential: bool = True):
    """(H X) / X at one point, X = Phi^-1 Psi, via logarithmic derivatives."""
    mp = ctx.mp
    m = kidx.m
    tau = ctx.tau
    facs = _log_factors(ctx, kidx)
    zs = list(zs)
    dL = [mp.mpf(0)] * m
    d2L = [mp.mpf(0)] * m
    dtau = mp.mpf(0)
    for ex, h in facs:
        h0 = h(zs, tau)
        for j in range(m):
            def hj(s, j=j):
                w = list(zs)
                w[j] = s
                return h(w, tau)
            d1 = mp.diff(hj, zs[j]) / h0
            d2 = mp.diff(hj, zs[j], 2) / h0
            dL[j] += ex * d1
            d2L[j] += ex * (d2 - d1 * d1)
        dtau += ex * mp.diff(lambda t: h(zs, t), tau) / h0
    total = -12j * mp.pi * m * dtau
    for j in range(m):
        total += d2L[j] + dL[j] ** 2
        if with_potential:
            total -= ctx.V(kidx.k, zs[j])
    return total


def schroedinger_grid(ctx: EllipticCtx, m: int, count: int = 12, seed: int = 11):
    import random

    rng = random.Random(seed)
    mp = ctx.mp
    pts = []
    while len(pts) < count:
        zs = []
        for _ in range(m):
            z = mp.mpf(rng.uniform(0.03, 0.47)) + mp.mpf(rng.uniform(0.1, 0.9)) * ctx.tau / 2
            zs.append(z)
        if all(ctx.distance_to_lattice(z) > 0.03 for z in zs):
            pts.append(zs)
    return pts


@dataclass
class SchroedingerReport:
    k: Tuple[int, ...]
    m: int
    values: List = field(default_factory=list)
    mean: complex = 0
    spread: float = float("inf")
    tolerance: float = 1e-4
    with_potential: bool = True

    @property
    def passed(self) -> bool:
        return self.spread < self.tolerance

    def to_json(self) -> dict:
        return {"k": list(self.k), "m": self.m, "grid_size": len(self.values),
                "mean": str(complex(self.mean)), "spread": self.spread,
                "tolerance": self.tolerance, "with_potential": self.with_potential,
                "pass": self.passed}


def verify_schroedinger(kidx: KIndex, ctx: EllipticCtx, grid=None, with_potential: bool = True,
                        tolerance: float = 1e-4) -> SchroedingerReport:
    grid = schroedinger_grid(ctx, kidx.m) if grid is None else grid
    for zs in grid:
        for z in zs:
            ctx.check_point(z)
    vals = [schroedinger_ratio(ctx, kidx, zs, with_potential) for zs in grid]
    mean = sum(vals) / len(vals)
    return SchroedingerReport(kidx.k, kidx.m, vals, complex(mean), spread(vals, ctx.mp),
                              tolerance, with_potential)
