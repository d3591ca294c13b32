import pytest
from hypothesis import given, settings, strategies as st

from thetapoly.kernel import KIndex, tau
from thetapoly.lattice import (A_LINES, B_LINES, TauLattice, applicable, bilinear_residual, bst_check,
                               bst_sides, lattice_points, lattice_verify, participants, quad_A, quad_B)
from thetapoly.scalars import ZETA as z

ks = st.tuples(*[st.integers(-5, 5)] * 4)


def test_quadric_constant_terms():
    assert quad_A((0, 0, 0, 0)) == -4 * (z + 1) ** 2 * (2 * z ** 2 - z + 2)
    assert quad_B((0, 0, 0, 0)) == -2 * (8 * z ** 4 + 18 * z ** 3 - 7 * z ** 2 - 18 * z - 4)
    assert len(A_LINES) == len(B_LINES) == 11


@given(ks, st.integers(0, 3))
@settings(max_examples=25)
def test_quadrics_have_degree_two(k, j):
    def at(t, q):
        kk = list(k)
        kk[j] = t
        return q(kk)
    for q in (quad_A, quad_B):
        d1 = at(k[j] + 1, q) - 2 * at(k[j], q) + at(k[j] - 1, q)
        d2 = at(k[j] + 2, q) - 2 * at(k[j] + 1, q) + at(k[j], q)
        assert d1 == d2


@pytest.mark.parametrize("which,k", [("a", (1, 0, 0, -1)), ("b", (0, 0, 0, 0)), ("a", (1, 1, 0, 0)),
                                     ("a", (0, 0, 0, 0)), ("b", (1, -1, 1, 1))])
def test_residual_examples(which, k):
    assert bilinear_residual(which, k).is_zero()


def test_wrong_quadric_is_detected():
    # a residual built from the other identity's data does not vanish
    lat = TauLattice()
    r = bilinear_residual("a", (0, 0, 0, 0), lat)
    assert r.is_zero()
    lo, hi, mid, partner = participants("b", (0, 0, 0, 0))
    assert lat.get(lo) * lat.get(hi) != lat.get(mid) * lat.get(partner) * quad_A((0, 0, 0, 0))


def test_participants():
    assert participants("a", (0, 0, 0, 0)) == [(-2, 0, 0, 0), (1, 1, 0, 0), (0, 0, 0, 0), (-1, 1, 0, 0)]
    assert participants("b", (0, 0, 0, 0)) == [(-2, 0, 0, 0), (1, -1, 0, 0), (0, 0, 0, 0), (-1, -1, 0, 0)]
    with pytest.raises(ValueError):
        bilinear_residual("a", (1, 0, 0, 0))


@pytest.mark.parametrize("k", [(1, 0, 0, 0), (0, 1, 1, 1), (-1, 0, 0, 0), (2, 1, 0, 0)])
def test_derivative_formula(k):
    assert bst_check(KIndex(k, 1))


def test_derivative_formula_trivial_side():
    lhs, rhs = bst_sides(KIndex((1, 0, 0, 0), 1))
    assert lhs.is_zero() and rhs.is_zero()


def test_window_two():
    pts = lattice_points(2)
    assert (0, 0, 0, 0) in pts and (1, -1, 0, 0) in pts and (0, 1, 0, -1) in pts
    rep = lattice_verify(2)
    assert rep.passed
    vals = {tuple(r["k"]) for r in rep.records}
    assert vals == set(pts)
    order = [r["n_norm"] for r in rep.records]
    assert order == sorted(order)


def test_lattice_write_once():
    lat = TauLattice()
    lat.get((0, 0, 0, 0))
    with pytest.raises(ValueError):
        lat.put((0, 0, 0, 0), z)
    with pytest.raises(ValueError):
        lat.put((2, 0, 0, 0), 0 * z)


def test_applicability():
    assert applicable("a", (0, 0, 0, 0), 2)
    assert not applicable("a", (1, 1, 0, 0), 2)
