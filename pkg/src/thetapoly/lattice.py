"""The tau lattice t^(k), its bilinear identities and the derivative formula at xi_0.

Every t^(k) is computed from the determinant construction; the bilinear
identities are only ever used as checks.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

from .kernel import XI, KIndex, general_T, n_norm, tau
from .pde import build_coeffs
from .scalars import ONE, ZERO, ZETA, RatFunZeta

z = ZETA

Vec = Tuple[int, int, int, int]


def _kpoly(*terms) -> Dict[Vec, int]:
    """Build a polynomial in k0..k3 from (coefficient, exponent-vector) pairs."""
    out: Dict[Vec, int] = {}
    for c, e in terms:
        out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c}


K00 = (2, 0, 0, 0)
K01 = (1, 1, 0, 0)
K11 = (0, 2, 0, 0)
K22 = (0, 0, 2, 0)
K33 = (0, 0, 0, 2)
K02 = (1, 0, 1, 0)
K12 = (0, 1, 1, 0)
K03 = (1, 0, 0, 1)
K13 = (0, 1, 0, 1)
K23 = (0, 0, 1, 1)
K0 = (1, 0, 0, 0)
K1 = (0, 1, 0, 0)
K2 = (0, 0, 1, 0)
K3 = (0, 0, 0, 1)
K_ = (0, 0, 0, 0)

# One entry per displayed line: (zeta factor, polynomial in k).
A_LINES: List[Tuple[RatFunZeta, Dict[Vec, int]]] = [
    (2 * z**4 - 23 * z**3 - 36 * z**2 - 5 * z + 8, _kpoly((1, K00))),
    (-z * (2 * z + 1) * (3 * z**2 + 10 * z + 5), _kpoly((2, K01), (1, K11))),
    (-z * (6 * z**3 + 19 * z**2 + 4 * z - 11), _kpoly((1, K22))),
    (-z * (2 * z + 1) * (3 * z**2 + 2 * z + 1), _kpoly((1, K33))),
    (-2 * z * (z - 1) * (2 * z + 1) * (z + 3), _kpoly((1, K02), (1, K12))),
    (-2 * (z - 1) * (2 * z + 1) * (3 * z**2 + 9 * z + 4), _kpoly((1, K03), (1, K13))),
    (-2 * (2 * z + 1) * (z**3 + 6 * z**2 + 3 * z - 4), _kpoly((1, K23))),
    (-4 * (2 * z + 1) * (z**2 + 5 * z + 3), _kpoly((1, K0), (1, K1))),
    (4 * (2 * z + 1) * (2 * z**3 + 5 * z**2 - z - 3), _kpoly((1, K2))),
    (4 * (2 * z + 1) * (z**2 + z + 1), _kpoly((1, K3))),
    (-4 * (z + 1) ** 2 * (2 * z**2 - z + 2), _kpoly((1, K_))),
]

B_LINES: List[Tuple[RatFunZeta, Dict[Vec, int]]] = [
    (10 * z**4 + 13 * z**3 - 28 * z**2 - 41 * z - 8, _kpoly((1, K00))),
    (-z * (2 * z + 1) * (3 * z**2 + 10 * z + 5), _kpoly((1, K11), (-2, K01))),
    (-z * (6 * z**3 + 19 * z**2 + 4 * z - 11), _kpoly((1, K22))),
    (-z * (2 * z + 1) * (3 * z**2 + 2 * z + 1), _kpoly((1, K33))),
    (2 * z * (z - 1) * (2 * z + 1) * (z + 3), _kpoly((1, K02), (-1, K12))),
    (2 * (z - 1) * (2 * z + 1) * (3 * z**2 + 9 * z + 4), _kpoly((1, K03), (-1, K13))),
    (-2 * (2 * z + 1) * (z**3 + 6 * z**2 + 3 * z - 4), _kpoly((1, K23))),
    (2 * (z - 1) * (2 * z + 1) * (z + 3) * (3 * z + 2), _kpoly((1, K1), (-1, K0))),
    (2 * (2 * z + 1) * (5 * z**3 + 12 * z**2 - 5 * z - 6), _kpoly((1, K2))),
    (2 * (2 * z + 1) * (3 * z**3 + 8 * z**2 - 3 * z - 2), _kpoly((1, K3))),
    (-2 * (8 * z**4 + 18 * z**3 - 7 * z**2 - 18 * z - 4), _kpoly((1, K_))),
]


def coefficient_table(lines) -> Dict[Vec, RatFunZeta]:
    """Merge the displayed lines into one map k-monomial -> zeta coefficient."""
    table: Dict[Vec, RatFunZeta] = {}
    for factor, kp in lines:
        for e, c in kp.items():
            table[e] = table.get(e, ZERO) + factor * c
    return {e: c for e, c in table.items() if not c.is_zero()}


A_TABLE = coefficient_table(A_LINES)
B_TABLE = coefficient_table(B_LINES)


def _eval_table(table: Dict[Vec, RatFunZeta], k: Sequence[int]) -> RatFunZeta:
    out = ZERO
    for e, c in table.items():
        mono = 1
        for kj, ej in zip(k, e):
            mono *= kj ** ej
        if mono:
            out = out + c * mono
    return out


def quad_A(k: Sequence[int]) -> RatFunZeta:
    return _eval_table(A_TABLE, k)


def quad_B(k: Sequence[int]) -> RatFunZeta:
    return _eval_table(B_TABLE, k)


def _add(k, *shifts) -> Vec:
    out = list(k)
    for c, j in shifts:
        out[j] += c
    return tuple(out)


def participants(which: str, k: Sequence[int]) -> List[Vec]:
    """Lattice points entering the identity, in the order (lhs1, lhs2, t, partner)."""
    s = 1 if which == "a" else -1
    return [_add(k, (-2, 0)), _add(k, (1, 0), (s, 1)), tuple(k), _add(k, (-1, 0), (s, 1))]


class TauLattice:
    """Write-once map k -> t^(k), filled from the determinant construction."""

    def __init__(self):
        self.entries: Dict[Vec, RatFunZeta] = {}
        self.source: Dict[Vec, str] = {}
        self._derivs: Dict[Vec, RatFunZeta] = {}

    def __contains__(self, k):
        return tuple(k) in self.entries

    def put(self, k, value: RatFunZeta, source: str = "external"):
        k = tuple(k)
        if value.is_zero():
            raise ValueError(f"t^{k} vanishes identically")
        if k in self.entries and self.entries[k] != value:
            raise ValueError(f"conflicting values for t^{k}")
        self.entries[k] = value
        self.source[k] = source

    def get(self, k) -> RatFunZeta:
        k = tuple(k)
        v = self.entries.get(k)
        if v is None:
            v = tau(k)
            self.put(k, v, "determinant")
        return v

    def deriv(self, k) -> RatFunZeta:
        k = tuple(k)
        v = self._derivs.get(k)
        if v is None:
            v = self._derivs[k] = self.get(k).diff()
        return v


def bilinear_residual(which: str, k: Sequence[int], lattice: TauLattice | None = None) -> RatFunZeta:
    """Left side minus right side of the first ('a') or second ('b') identity."""
    if which not in ("a", "b"):
        raise ValueError("which must be 'a' or 'b'")
    k = tuple(k)
    if sum(k) % 2:
        raise ValueError("|k| must be even")
    lat = lattice or TauLattice()
    lo, hi, mid, partner = participants(which, k)
    k0 = k[0]
    assert (2 * k0 - 1) * (2 * k0 + 1) != 0
    lhs = lat.get(lo) * lat.get(hi)
    t, dt = lat.get(mid), lat.deriv(mid)
    u, du = lat.get(partner), lat.deriv(partner)
    wron = t * du * RatFunZeta.const(1) / (2 * k0 - 1) - dt * u / (2 * k0 + 1)
    if which == "a":
        pre = z**2 * (z + 1) * (z - 1) * (2 * z + 1) ** 2
        quad = z * (2 * z + 1) / (2 * (2 * k0 - 1) * (2 * k0 + 1) * (z + 2)) * quad_A(k)
    else:
        pre = (z + 1) * (z - 1) * (2 * z + 1) ** 2 * (z + 2) ** 2 / z**2
        quad = (2 * z + 1) * (z + 2) / (2 * (2 * k0 - 1) * (2 * k0 + 1) * z**3) * quad_B(k)
    return lhs - pre * wron - quad * t * u


def bst_sides(kidx: KIndex) -> Tuple[RatFunZeta, RatFunZeta]:
    """Both sides of the derivative formula for dT/dx at x = xi_0 (m = 1)."""
    if kidx.m != 1:
        raise ValueError("the derivative formula is stated for one free variable")
    T = general_T(kidx)
    x0 = XI[0]
    lhs = T.partial(0).evaluate([x0])
    co = build_coeffs(kidx)
    up = kidx.shifted((1, 0, 0, 0), -1)
    t = tau(up.k)
    rhs = ((co.cF.evaluate([x0]) + co.e) * t + co.d * t.diff()) / (2 * co.d - co.bF.evaluate([x0]))
    return lhs, rhs


def bst_check(kidx: KIndex) -> bool:
    lhs, rhs = bst_sides(kidx)
    return lhs == rhs


def lattice_points(window: int) -> List[Vec]:
    r = range(-window, window + 1)
    pts = [k for k in itertools.product(r, repeat=4)
           if sum(map(abs, k)) <= window and sum(k) % 2 == 0]
    return sorted(pts, key=lambda k: (n_norm(k), k))


def _in_window(k, window) -> bool:
    return sum(map(abs, k)) <= window


def applicable(which: str, k, window: int) -> bool:
    return all(_in_window(p, window) for p in participants(which, k))


@dataclass
class LatticeReport:
    window: int
    records: List[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r["nonzero"] and all(r["residuals"].values()) for r in self.records)

    def to_json(self) -> list:
        return self.records


def _tau_job(k):
    return k, tau(k)


def lattice_verify(window: int, jobs: int = 1, lattice: TauLattice | None = None) -> LatticeReport:
    """Compute every t^(k) in the window, check nonvanishing and both identities."""
    lat = lattice or TauLattice()
    pts = lattice_points(window)
    todo = [k for k in pts if k not in lat]
    if jobs > 1 and todo:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as ex:
            for k, v in ex.map(_tau_job, todo):
                lat.put(k, v, "determinant")
    report = LatticeReport(window)
    for k in pts:
        t0 = time.perf_counter()
        v = lat.get(k)
        res = {}
        for which in ("a", "b"):
            if applicable(which, k, window):
                res[which] = bilinear_residual(which, k, lat).is_zero()
        report.records.append({
            "k": list(k), "n_norm": n_norm(k), "nonzero": not v.is_zero(),
            "residuals": res, "wall_time": round(time.perf_counter() - t0, 4),
        })
    return report
