from __future__ import annotations

import random

import pytest

from prequant.cech import DeligneCocycle, InvalidCocycleError, TotElement, d_tot, iota_tot, res
from prequant.courant import (
    atiyah1,
    atiyah2,
    atiyah_iso,
    atiyah_iso_slices,
    courant2,
    diagram_morphisms,
    dglie_truncated,
    equivalence_slices,
    fa_morphism,
    fc_fa_identities,
    in_truncated_degree_zero,
    kernel_residual,
    lie_algebra_at,
    observables_into_atiyah1,
    pairing,
    phi_morphism,
    psi_identities,
    psi_morphism,
    quantization_into_at,
)
from prequant.forms import PolyForm
from prequant.linfty import (
    GradedElement,
    LInftyMorphism,
    LInftyStructure,
    check_equal_morphisms,
    check_generalized_jacobi,
    check_morphism,
    compose_low,
    sample_tuples,
)
from prequant.quantization import quantomorphism_morphism, dglie_qu

from conftest import R2, R3, unit_fields

N1 = ["r2-trivial", "r2-two-box"]
N2 = ["r3-trivial", "r3-two-box", "r3-three-box"]


def _field(v) -> GradedElement:
    return GradedElement(0, {"v": v})


@pytest.fixture(scope="module")
def ladders(zoo):
    return {name: diagram_morphisms(zoo.cocycles[name].patch, zoo.cocycles[name].cocycle) for name in N2}


# --- n = 1 ---------------------------------------------------------------------------


def test_atiyah1_bracket_example(r2_poisson):
    dx, dy = unit_fields(R2)
    out = atiyah1(r2_poisson).bracket(2, _field(dx), _field(dy))
    assert out.get("v") is None or out.get("v").is_zero()
    assert out.get("form") == PolyForm.parse("-1", R2, 0)


def test_atiyah1_jacobi(r2_poisson):
    L = atiyah1(r2_poisson)
    rng = random.Random(0)
    for m in (1, 2, 3):
        assert check_generalized_jacobi(L, m, sample_tuples(L, m, 20, rng)).passed


@pytest.mark.parametrize("name", N1)
def test_atiyah_isomorphism(zoo, name):
    c = zoo.cocycles[name]
    P, C = c.patch, c.cocycle
    At = atiyah1(P)
    L = lie_algebra_at(P, C)
    iso = atiyah_iso(P, C, At, L)
    rng = random.Random(1)
    for m in (1, 2, 3):
        assert check_morphism(iso, m, sample_tuples(At, m, 10, rng)).passed
        assert check_generalized_jacobi(L, m, sample_tuples(L, m, 10, rng)).passed
    for fd in (1, 2):
        s = atiyah_iso_slices(P, C, fd)
        assert s["bijective"] and s["source_dim"] == s["target_dim"] == s["rank"] > 0


@pytest.mark.parametrize("name", N1)
def test_atiyah_square_commutes(zoo, name):
    c = zoo.cocycles[name]
    P, C = c.patch, c.cocycle
    At, L = atiyah1(P), lie_algebra_at(P, C)
    iso = atiyah_iso(P, C, At, L)
    f = quantomorphism_morphism(P, C)
    left = compose_low(iso, observables_into_atiyah1(P, f.source, At))
    right = compose_low(quantization_into_at(P, C, f.target, L), f)
    rng = random.Random(2)
    samples = {m: sample_tuples(f.source, m, 10, rng) for m in (1, 2)}
    assert check_equal_morphisms(left, right, (1, 2), samples, "square").passed


def test_atiyah_iso_on_unit_field(zoo):
    c = zoo.cocycles["r2-trivial"]
    dx, _ = unit_fields(R2)
    out = atiyah_iso(c.patch, c.cocycle).component(1, _field(dx))
    assert out.get("v") == dx
    assert out.get("tot") is None or out.get("tot").is_zero()


def test_atiyah1_needs_a_two_form(r3_volume):
    with pytest.raises(ValueError):
        atiyah1(r3_volume)


# --- n = 2: the algebras -------------------------------------------------------------


def test_frozen_brackets(r3_volume):
    dx, dy, dz = unit_fields(R3)
    es = [_field(v) for v in (dx, dy, dz)]
    assert courant2(r3_volume).bracket(3, *es).get("form") == PolyForm.parse("1/2", R3, 0)
    assert atiyah2(r3_volume).bracket(3, *es).get("form") == PolyForm.parse("-1", R3, 0)
    x = GradedElement(0, {"v": dx, "form": PolyForm.parse("dx", R3)})
    assert pairing(x, x, R3) == PolyForm.parse("2", R3, 0)


@pytest.mark.parametrize("build", [courant2, atiyah2])
def test_lie2_jacobi(r3_volume, build):
    L = build(r3_volume)
    rng = random.Random(3)
    for m in range(1, 5):
        assert check_generalized_jacobi(L, m, sample_tuples(L, m, 15, rng)).passed


def test_flipped_courant_l3_fails(r3_volume):
    cou = courant2(r3_volume)
    bad = LInftyStructure("bad", 1, {1: cou.brackets[1], 2: cou.brackets[2], 3: lambda *xs: cou.brackets[3](*xs) * -1},
                          cou.sampler)
    assert not check_generalized_jacobi(bad, 3, sample_tuples(bad, 3, 15, random.Random(4))).passed


def test_phi_and_psi(r3_volume):
    cou, at = courant2(r3_volume), atiyah2(r3_volume)
    phi, psi = phi_morphism(r3_volume, cou=cou), psi_morphism(r3_volume, cou, at)
    rng = random.Random(5)
    for m in range(1, 5):
        assert check_morphism(phi, m, sample_tuples(phi.source, m, 8, rng)).passed
        assert check_morphism(psi, m, sample_tuples(cou, m, 8, rng)).passed
    dx = unit_fields(R3)[0]
    eta = GradedElement(1, {"form": PolyForm.parse("x", R3, 0)})
    assert phi.component(1, eta) == eta
    assert psi.component(1, GradedElement(0, {"v": dx, "form": PolyForm.parse("y dz", R3)})) == _field(dx)


def test_flipped_psi2_fails(r3_volume):
    cou, at = courant2(r3_volume), atiyah2(r3_volume)
    psi = psi_morphism(r3_volume, cou, at)
    bad = LInftyMorphism("bad", cou, at, {1: psi.components[1],
                                          2: lambda x, y: (psi.components[2](x, y) or GradedElement.zero(1)) * -1})
    rng = random.Random(6)
    assert not all(check_morphism(bad, m, sample_tuples(cou, m, 10, rng)).passed for m in (2, 3))


def test_psi_identities(r3_volume):
    cou = courant2(r3_volume)
    rng = random.Random(7)
    for _ in range(10):
        xs = [cou.sample(rng, 0) for _ in range(3)]
        res_ = psi_identities(r3_volume, xs, cou.sample(rng, 1))
        assert len(res_) == 5
        assert all(r.is_zero() for r in res_.values()), res_


# --- n = 2: Cech models and the ladder -----------------------------------------------


@pytest.mark.parametrize("name", N2)
def test_truncated_models(ladders, zoo, name):
    D = ladders[name]
    C = zoo.cocycles[name].cocycle
    rng = random.Random(8)
    for key in ("cou", "at"):
        L = D[key]
        for m in (1, 2, 3):
            assert check_generalized_jacobi(L, m, sample_tuples(L, m, 6, rng)).passed
        for _ in range(5):
            assert in_truncated_degree_zero(L, C, L.sample(rng, 0))


@pytest.mark.parametrize("name", N2)
def test_fc_fa_morphisms(ladders, name):
    D = ladders[name]
    rng = random.Random(9)
    for key in ("fc", "fa"):
        F = D[key]
        for m in range(1, 5):
            assert check_morphism(F, m, sample_tuples(F.source, m, 6, rng)).passed


@pytest.mark.parametrize("name", N2)
def test_ladder_commutes(ladders, name):
    D = ladders[name]
    rng = random.Random(10)
    for left, right, src in (("fc.phi", "i.f", "observables"), ("fa.psi", "p.fc", "courant"),
                             ("fa.psi.phi", "p.i.f", "observables")):
        samples = {m: sample_tuples(D[src], m, 10, rng) for m in (1, 2)}
        assert check_equal_morphisms(D[left], D[right], (1, 2), samples, left).passed


def test_flipped_fc2_fails(ladders):
    fc = ladders["r3-two-box"]["fc"]
    bad = LInftyMorphism("bad", fc.source, fc.target,
                         {1: fc.components[1], 2: lambda x, y: (fc.components[2](x, y) or GradedElement.zero(1)) * -1})
    rng = random.Random(11)
    assert not all(check_morphism(bad, m, sample_tuples(fc.source, m, 10, rng)).passed for m in (2, 3))


@pytest.mark.parametrize("name", N2)
def test_fc_fa_identities(ladders, zoo, name):
    c = zoo.cocycles[name]
    rng = random.Random(12)
    for _ in range(6):
        xs = [ladders[name]["courant"].sample(rng, 0) for _ in range(3)]
        res_ = fc_fa_identities(c.patch, c.cocycle, xs)
        assert len(res_) == 6
        assert all(r.is_zero() for r in res_.values()), res_


def test_frozen_fc_fa_values(ladders):
    D = ladders["r3-trivial"]
    dx, dy, _ = unit_fields(R3)
    a, b = _field(dx), _field(dy)
    assert D["fa"].component(1, a) == a
    assert D["fa"].component(2, a, b).get("tot").form_at((0,)) == PolyForm.parse("z", R3, 0)
    assert D["fc"].component(2, a, b).get("tot").form_at((0,)) == PolyForm.parse("z", R3, 0)


@pytest.mark.parametrize("name", N2)
def test_kernel_identities(ladders, zoo, name):
    C = zoo.cocycles[name].cocycle
    rng = random.Random(13)
    for level, key in (("courant", "cou"), ("atiyah", "at")):
        for _ in range(6):
            assert kernel_residual(C, ladders[name][key].sample(rng, 0), level).is_zero()


def test_kernel_sign_matters(ladders, zoo):
    # on the three-box cover A^0 is nonzero, so the opposite sign is detectable
    C = zoo.cocycles["r3-three-box"].cocycle
    rng = random.Random(14)
    wrong = []
    for _ in range(6):
        x = ladders["r3-three-box"]["at"].sample(rng, 0)
        t = x.get("tot") or TotElement.zero(C.cover, 1)
        wrong.append(d_tot(t - iota_tot([x.get("v")], C.part(1)), 0).is_zero())
    assert not all(wrong)


@pytest.mark.parametrize("name", N2)
@pytest.mark.parametrize("which", ["courant", "atiyah"])
def test_equivalence_slices(zoo, name, which):
    c = zoo.cocycles[name]
    r = equivalence_slices(c.patch, c.cocycle, which)
    assert r["chain_map"] and r["quasi_isomorphism"]


def test_unknown_level(zoo):
    c = zoo.cocycles["r3-trivial"]
    with pytest.raises(ValueError, match="unknown level"):
        dglie_truncated(c.patch, c.cocycle, "bogus")


def test_invalid_cocycle_is_rejected(zoo):
    c = zoo.cocycles["r3-two-box"]
    C = c.cocycle
    broken = DeligneCocycle(C.cover, 2, C.A + res(C.cover, PolyForm.parse("z dx^dy", R3)))
    for build in (lambda: dglie_truncated(c.patch, broken, "courant"), lambda: fa_morphism(c.patch, broken),
                  lambda: dglie_qu(c.patch, broken)):
        with pytest.raises(InvalidCocycleError, match="invalid cocycle"):
            build()


def test_pairing_is_symmetric(r3_volume):
    cou = courant2(r3_volume)
    rng = random.Random(15)
    for _ in range(10):
        x, y = cou.sample(rng, 0), cou.sample(rng, 0)
        assert pairing(x, y, R3) == pairing(y, x, R3)
