from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prequant.algebra import Poly
from prequant.cech import (
    Collation,
    Cover,
    DeligneCocycle,
    TotElement,
    a_twist,
    cech_delta,
    check_deligne,
    d_tot,
    deligne_from_potential,
    iota_tot,
    lie_tot,
    res,
    signed_d,
    tot_complex,
    truncated_de_rham_cohomology,
    truncated_tot_cohomology,
)
from prequant.forms import PolyForm, d, poincare_homotopy
from prequant.sampling import rand_form, rand_vector_field

from conftest import R2, R3

TWO_BOX = Cover(R2, [[(None, 1), (None, None)], [(0, None), (None, None)]], "two-box")
THREE_BOX = Cover(R3, [[(None, 2), (None, None), (None, None)], [(0, None), (None, None), (None, None)],
                       [(1, 3), (None, None), (None, None)]], "three-box")
COVERS = [Cover.trivial(R2), TWO_BOX, Cover.trivial(R3), THREE_BOX]


def rand_tot(rng: random.Random, cover: Cover, degree: int, max_deg: int = 2) -> TotElement:
    dim = cover.patch.dim
    data = {}
    for i, simplices in cover.simplices.items():
        if 0 <= degree - i <= dim:
            for s in simplices:
                if rng.random() < 0.8:
                    data[s] = rand_form(rng, cover.patch, degree - i, max_deg)
    return TotElement(cover, degree, data)


covers = st.sampled_from(COVERS)
seeds = st.integers(0, 2**32).map(random.Random)


# --- the nerve -----------------------------------------------------------------------


def test_nerves():
    assert TWO_BOX.simplices == {0: [(0,), (1,)], 1: [(0, 1)]}
    assert THREE_BOX.simplices[2] == [(0, 1, 2)]
    far = Cover(R2, [[(None, 0), (None, None)], [(1, None), (None, None)]])
    assert far.simplices == {0: [(0,), (1,)]}
    assert not far.in_nerve((0, 1))


def test_bad_boxes_rejected():
    with pytest.raises(ValueError):
        Cover(R2, [[(1, 0), (None, None)]])
    with pytest.raises(ValueError):
        Cover(R2, [[(None, None)]])
    with pytest.raises(ValueError):
        TotElement(Cover(R2, [[(None, 0), (None, None)], [(1, None), (None, None)]]), 0,
                   {(0, 1): PolyForm.parse("x", R2, 0)})


# --- differentials -------------------------------------------------------------------


def test_delta_and_signed_d_conventions():
    t0, t1 = PolyForm.parse("x dy", R2), PolyForm.parse("y dx", R2)
    x = TotElement(TWO_BOX, 1, {(0,): t0, (1,): t1})
    assert cech_delta(x).form_at((0, 1)) == t1 - t0
    g = PolyForm.parse("x*y", R2, 0)
    e = TotElement(TWO_BOX, 1, {(0, 1): g})
    assert signed_d(e).form_at((0, 1)) == -d(g)
    # reversing a simplex flips the sign of its component
    assert TotElement(TWO_BOX, 1, {(1, 0): g}).form_at((0, 1)) == -g


@given(covers, st.integers(0, 3), seeds)
def test_differentials_square_to_zero(cover, degree, rng):
    x = rand_tot(rng, cover, degree)
    assert cech_delta(cech_delta(x)).is_zero()
    assert signed_d(signed_d(x)).is_zero()
    assert d_tot(d_tot(x)).is_zero()


@given(covers, st.integers(0, 3), seeds)
def test_lie_derivative_commutes_with_d_tot(cover, degree, rng):
    x = rand_tot(rng, cover, degree)
    v = rand_vector_field(rng, cover.patch, 1)
    assert lie_tot(v, d_tot(x)) == d_tot(lie_tot(v, x))


@given(covers, seeds)
def test_restriction_is_a_chain_map(cover, rng):
    a = rand_form(rng, cover.patch, 1, 2)
    assert d_tot(res(cover, a)) == res(cover, d(a))
    assert cech_delta(res(cover, a)).is_zero()


# --- Deligne cocycles ----------------------------------------------------------------


def test_shipped_cocycles_validate(zoo):
    for name, c in zoo.cocycles.items():
        report = check_deligne(c.cocycle, c.patch.omega)
        assert report == {"passed": True, "violations": []}, name


def test_cocycle_parts(zoo):
    C = zoo.cocycles["r3-two-box"].cocycle
    assert C.part(0).form_at((1,)) == PolyForm.parse("z dx^dy + dx^dz", R3)
    assert C.part(1).form_at((0, 1)) == PolyForm.parse("x dz + z dy + y dz", R3)
    assert C.part(2).is_zero()
    total = C.part(0) + C.part(1) + C.part(2)
    assert total == C.A
    assert a_twist(C, 1) == C.part(0) - C.part(1) + C.part(2)
    assert a_twist(C, 2) == C.A


def test_broken_cocycle_is_reported(zoo):
    c = zoo.cocycles["r2-two-box"]
    A = c.cocycle.A + TotElement(TWO_BOX, 1, {(0, 1): PolyForm.parse("x", R2, 0)})
    report = check_deligne(DeligneCocycle(TWO_BOX, 1, A), c.patch.omega)
    assert not report["passed"]
    assert report["violations"] == ["delta A^1"]
    wrong_curv = DeligneCocycle(TWO_BOX, 1, res(TWO_BOX, PolyForm.parse("2*x dy", R2)))
    assert check_deligne(wrong_curv, c.patch.omega)["violations"] == ["curvature"]


def test_non_constant_top_component_is_reported():
    A = TotElement(THREE_BOX, 2, {(0, 1, 2): PolyForm.parse("x", R3, 0)})
    C = deligne_from_potential(THREE_BOX, PolyForm.parse("z dx^dy", R3))
    omega = PolyForm.parse("dx^dy^dz", R3)
    broken = DeligneCocycle(THREE_BOX, 2, C.A + A)
    assert check_deligne(broken, omega) == {"passed": False, "violations": ["delta A^1"]}
    shifted = TotElement(THREE_BOX, 2, {(0, 1, 2): PolyForm.parse("5", R3, 0)})
    assert check_deligne(DeligneCocycle(THREE_BOX, 2, C.A + shifted), omega)["passed"]


def test_non_closed_omega_raises():
    C = deligne_from_potential(Cover.trivial(R3), PolyForm.parse("z dx^dy", R3))
    with pytest.raises(ValueError, match="omega not closed"):
        check_deligne(C, PolyForm.parse("z dx^dy", R3))


@given(seeds)
def test_potential_plus_gauge_is_a_cocycle(rng):
    omega = PolyForm.parse("dx^dy^dz", R3)
    pot = poincare_homotopy(omega)
    gauge = rand_tot(rng, THREE_BOX, 1)
    C = deligne_from_potential(THREE_BOX, pot, gauge, {(0, 1, 2): rng.randint(-3, 3)})
    assert C.is_cocycle(omega)


# --- collation -----------------------------------------------------------------------


def _collation(cover):
    names = cover.patch.names
    if len(cover) == 1:
        return Collation(cover, [Poly.const(1, names)])
    if len(cover) == 2:
        x = Poly.var("x", names)
        return Collation(cover, [1 - x, x])
    x, y = Poly.var("x", names), Poly.var("y", names)
    return Collation(cover, [1 - x, x - y, y])


@given(covers, st.integers(0, 3), seeds)
def test_collation_identities(cover, degree, rng):
    col = _collation(cover)
    if degree <= cover.patch.dim:
        a = rand_form(rng, cover.patch, degree, 2)
        assert col.j(res(cover, a)) == a
    x = rand_tot(rng, cover, degree)
    assert col.homotopy_residual(x).is_zero()
    if degree < cover.patch.dim:
        assert d(col.j(x)) == col.j(d_tot(x))
    elif degree > cover.patch.dim:
        assert col.j(x) is None


def test_homotopy_sign_matters():
    col = _collation(TWO_BOX)
    x = rand_tot(random.Random(1), TWO_BOX, 1)
    assert not col.H(d_tot(x)).is_zero()
    wrong = x - res(TWO_BOX, col.j(x)) - d_tot(col.H(x)) + col.H(d_tot(x))
    assert not wrong.is_zero()


def test_weights_must_sum_to_one():
    x = Poly.var("x", R2.names)
    with pytest.raises(ValueError):
        Collation(TWO_BOX, [x, x])
    with pytest.raises(ValueError):
        Collation(TWO_BOX, [Poly.const(1, R2.names)])


# --- truncated cohomology ------------------------------------------------------------


@pytest.mark.parametrize("weight", [0, 1, 2, 3])
def test_de_rham_truncation_is_contractible(weight):
    assert truncated_de_rham_cohomology(R3, weight) == {k: (1 if k == 0 else 0) for k in range(4)}


@pytest.mark.parametrize("cover", COVERS, ids=lambda c: f"{c.patch.dim}d-{len(c)}")
@pytest.mark.parametrize("weight", [0, 1, 2])
def test_tot_matches_de_rham(cover, weight):
    assert tot_complex(cover, weight).is_complex()
    tot = truncated_tot_cohomology(cover, weight)
    dr = truncated_de_rham_cohomology(cover.patch, weight)
    assert {k: v for k, v in tot.items() if v} == {k: v for k, v in dr.items() if v}


def test_iota_tot_acts_formwise():
    x = TotElement(TWO_BOX, 2, {(0,): PolyForm.parse("dx^dy", R2), (0, 1): PolyForm.parse("y dx", R2)})
    v = rand_vector_field(random.Random(0), R2, 1)
    out = iota_tot([v], x)
    assert out.degree == 1
    assert out.form_at((0, 1)) == iota_tot([v], TotElement(TWO_BOX, 2, {(0, 1): PolyForm.parse("y dx", R2)})).form_at((0, 1))
