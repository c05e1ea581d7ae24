from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prequant.cech import TotElement, d_tot, lie_tot
from prequant.forms import PolyForm, PolyMultivector
from prequant.linfty import (
    GradedElement,
    LInftyMorphism,
    check_generalized_jacobi,
    check_morphism,
    morphism_residual,
    sample_tuples,
)
from prequant.observables import obs_pair
from prequant.quantization import (
    quantomorphism_morphism,
    dglie_qu,
    f1_truncated,
    closed_form_dtot,
    closed_form_I1,
    closed_form_I2,
    closed_form_I3,
    closed_form_J1,
    closed_form_J2,
    lie_multivector_expansion_residual,
    lie_sum_expansion_residual,
    master_equation_blocks,
    master_equation_residual,
    s_map,
    verify_master_equation,
)
from prequant.sampling import rand_form, rand_vector_field

from conftest import R3, unit_fields

DATASETS = ["r2-trivial", "r2-two-box", "r3-trivial", "r3-two-box", "r3-three-box"]
seeds = st.integers(0, 2**32).map(random.Random)


@pytest.fixture(scope="module")
def morphisms(zoo):
    out = {}
    for name in DATASETS:
        c = zoo.cocycles[name]
        out[name] = (c.patch, c.cocycle, quantomorphism_morphism(c.patch, c.cocycle))
    return out


@pytest.mark.parametrize("name", DATASETS)
def test_quantization_dg_lie_jacobi(morphisms, name):
    P, C, F = morphisms[name]
    L = F.target
    rng = random.Random(1)
    for m in (1, 2, 3):
        assert check_generalized_jacobi(L, m, sample_tuples(L, m, 8, rng)).passed


@pytest.mark.parametrize("name", DATASETS)
def test_master_equation_and_morphism_agree(morphisms, name):
    P, C, F = morphisms[name]
    rng = random.Random(2)
    for m in range(1, P.n + 2):
        samples = sample_tuples(F.source, m, 8, rng)
        assert verify_master_equation(F, m, samples).passed
        assert check_morphism(F, m, samples).passed
        # the block sum and the generic morphism residual are separate routes
        for xs in samples:
            assert master_equation_residual(F, xs) == morphism_residual(F, xs)


@pytest.mark.parametrize("name", DATASETS)
def test_block_closed_forms(morphisms, name):
    P, C, F = morphisms[name]
    rng = random.Random(3)
    for m in range(2, P.n + 2):
        for xs in sample_tuples(F.source, m, 6, rng):
            b = master_equation_blocks(F, xs)
            assert b["I1"] == closed_form_I1(P, C, xs)
            assert b["I2"] == closed_form_I2(P, C, xs)
            assert b["J"] == closed_form_J1(F, xs)
            assert b["dtot"] == closed_form_dtot(P, C, xs)
            if m >= 3:
                assert b["I3"] == closed_form_I3(P, C, xs)
                assert b["J"] == closed_form_J2(P, C, xs)


def test_last_field_lie_variant_is_not_an_identity(morphisms):
    P, C, F = morphisms["r3-three-box"]
    rng = random.Random(4)
    xs_list = [[F.source.sample(rng, 0) for _ in range(3)] for _ in range(10)]
    assert any(master_equation_blocks(F, xs)["J"] != closed_form_J2(P, C, xs, lie_index="m") for xs in xs_list)
    with pytest.raises(ValueError):
        closed_form_J2(P, C, [F.source.sample(rng, 1), F.source.sample(rng, 0), F.source.sample(rng, 0)], lie_index="m")


def test_corrupted_morphism_fails_with_blocks(morphisms):
    P, C, F = morphisms["r3-two-box"]
    bad = LInftyMorphism("bad", F.source, F.target, {1: F.components[1], 2: lambda x, y: F.components[2](x, y) * -1})
    rng = random.Random(5)
    res = verify_master_equation(bad, 2, sample_tuples(F.source, 2, 10, rng))
    assert not res.passed
    assert set(res.failures[0]["blocks"]) == {"I1", "I2", "I3", "J", "dtot"}
    with pytest.raises(ValueError):
        verify_master_equation(F, 3, sample_tuples(F.source, 2, 1, rng))


def test_frozen_components(morphisms):
    P, C, F = morphisms["r3-trivial"]
    dx, dy, _ = unit_fields(R3)
    a = obs_pair(dx, PolyForm.parse("-y dz", R3))
    b = obs_pair(dy, PolyForm.parse("x dz", R3))
    f2 = F.component(2, a, b)
    assert f2.degree == 1 and f2.get("tot").form_at((0,)) == PolyForm.parse("z", R3, 0)
    f1 = F.component(1, a)
    assert f1.get("v") == dx
    assert f1.get("tot").form_at((0,)) == PolyForm.parse("y dz + z dy", R3)


def test_s_map_example():
    dx, dy, _ = unit_fields(R3)
    xs = [obs_pair(dx, PolyForm.parse("x dy", R3)), obs_pair(dy, PolyForm.parse("z dx", R3))]
    assert s_map(xs, R3, 2) == PolyForm.parse("z - x", R3, 0)


@pytest.mark.parametrize("name", DATASETS)
def test_image_of_f1_satisfies_defining_equation(morphisms, name):
    P, C, F = morphisms[name]
    rng = random.Random(6)
    for _ in range(10):
        x = F.source.sample(rng, 0)
        y = F.component(1, x)
        tot = y.get("tot") or TotElement.zero(C.cover, P.n - 1)
        assert lie_tot(y.get("v"), C.A) == d_tot(tot)


@given(seeds, st.integers(1, 3))
def test_lie_of_wedge_expansion(rng, m):
    vs = [rand_vector_field(rng, R3, 1) for _ in range(m)]
    a = rand_form(rng, R3, 3, 1)
    assert lie_multivector_expansion_residual(vs, a).is_zero()


def test_lie_of_wedge_last_field_variant_fails():
    rng = random.Random(0)
    vs = [rand_vector_field(rng, R3, 1) for _ in range(2)]
    a = rand_form(rng, R3, 3, 1)
    assert not lie_multivector_expansion_residual(vs, a, "m").is_zero()


@given(seeds, st.integers(2, 3))
def test_lie_sum_expansion(rng, m):
    vs = [rand_vector_field(rng, R3, 1) for _ in range(m)]
    thetas = [rand_form(rng, R3, 2, 1) for _ in range(m)]
    assert lie_sum_expansion_residual(vs, thetas).is_zero()


@pytest.mark.parametrize("name", ["r2-two-box", "r3-trivial", "r3-three-box"])
def test_f1_quasi_isomorphism_on_slices(zoo, name):
    c = zoo.cocycles[name]
    out = f1_truncated(c.patch, c.cocycle, 1)
    assert out["chain_map"] and out["quasi_isomorphism"]
    assert out["source_dims"] and out["target_dims"]


def test_qu_has_no_higher_brackets(morphisms):
    P, C, F = morphisms["r3-trivial"]
    L = dglie_qu(P, C)
    assert 3 not in L.brackets
    z = PolyMultivector.zero(R3, 1)
    assert L.bracket(2, GradedElement(0, {"v": z}), GradedElement(0, {"v": z})).is_zero()
