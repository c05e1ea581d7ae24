from __future__ import annotations

import itertools
import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st

import prequant.observables as ob
from prequant.algebra import perm_sign
from prequant.forms import PolyForm, PolyMultivector, contract, d, lie
from prequant.linfty import (
    GradedElement,
    check_fiber_hypotheses,
    check_equal_morphisms,
    check_generalized_jacobi,
    check_morphism,
    compose,
    sample_tuples,
    vanishes_by_degree,
)
from prequant.observables import (
    FDLieAlgebra,
    NotClosedError,
    PrePlecticPatch,
    build_observables,
    kks_cocycle,
    kks_fiber_data,
    kks_identity_residual,
    obs_form,
    obs_pair,
    restrict_cocycle,
    solve_hamiltonian,
    string_cocycle,
    string_lie2,
)
from prequant.sampling import rand_combination, rand_vector_field

from conftest import R2, R3, unit_fields

PATCHES = ["r2_poisson", "r3_volume", "r4_degenerate"]


def _patch(request, name) -> PrePlecticPatch:
    return request.getfixturevalue(name)


# --- sign conventions ----------------------------------------------------------------


@pytest.mark.parametrize("k", range(1, 8))
def test_sign_tables(k):
    assert ob.bracket_sign(k) == -((-1) ** (k * (k + 1) // 2))
    assert ob.kks_sign(k) == -((-1) ** (k * (k - 1) // 2))


def test_sign_values():
    assert [ob.bracket_sign(k) for k in range(1, 6)] == [1, 1, -1, -1, 1]
    assert [ob.kks_sign(k) for k in range(1, 6)] == [-1, 1, 1, -1, -1]


# --- the observables -----------------------------------------------------------------


def test_non_closed_form_is_rejected():
    with pytest.raises(NotClosedError, match="omega not closed"):
        PrePlecticPatch.from_text(["x", "y", "z"], "x dy^dz + y dx^dy")


def test_poisson_bracket_example(r2_poisson):
    dx, dy = unit_fields(R2)
    L = build_observables(r2_poisson)
    a = obs_pair(dx, PolyForm.parse("-y", R2, 0))
    b = obs_pair(dy, PolyForm.parse("x", R2, 0))
    out = L.bracket(2, a, b)
    assert out.get("v") is None or out.get("v").is_zero()
    assert out.get("form") == PolyForm.parse("1", R2, 0)


def test_two_plectic_brackets(r3_volume):
    dx, dy, dz = unit_fields(R3)
    L = build_observables(r3_volume)
    a = obs_pair(dx, PolyForm.parse("-y dz", R3))
    b = obs_pair(dy, PolyForm.parse("x dz", R3))
    c = solve_hamiltonian(r3_volume, dz)
    assert L.bracket(2, a, b).get("form") == PolyForm.parse("dz", R3)
    assert L.bracket(3, a, b, c).get("form") == PolyForm.parse("-1", R3, 0)
    # l_1 is the de Rham differential on positive degree
    eta = obs_form(1, PolyForm.parse("x*y", R3, 0))
    assert L.bracket(1, eta).get("form") == PolyForm.parse("y dx + x dy", R3)


@pytest.mark.parametrize("name", PATCHES)
def test_hamiltonian_solutions(request, name):
    P = _patch(request, name)
    for v in P.hamiltonian_fields(2):
        x = solve_hamiltonian(P, v)
        H = x.get("form") or PolyForm.zero(P.patch, P.n - 1)
        assert P.is_hamiltonian(v, H)
        assert (contract([v], P.omega) + d(H)).is_zero()
        assert lie(v, P.omega).is_zero()


def test_non_hamiltonian_field_has_no_form(r2_poisson):
    x = r2_poisson.patch.coord("x")
    v = PolyMultivector.vector(R2, [x, 0])
    with pytest.raises(ValueError):
        r2_poisson.hamiltonian_form(v)


@pytest.mark.parametrize("name", PATCHES)
def test_generalized_jacobi(request, name):
    P = _patch(request, name)
    L = build_observables(P)
    rng = random.Random(7)
    for m in range(1, P.n + 3):
        res = check_generalized_jacobi(L, m, sample_tuples(L, m, 12, rng))
        assert res.passed, res.failures[:1]
    assert vanishes_by_degree(L, P.n + 3)
    assert not vanishes_by_degree(L, P.n + 2)


def test_flipped_ternary_sign_breaks_jacobi(monkeypatch, r3_volume):
    orig = ob.bracket_sign
    monkeypatch.setattr(ob, "bracket_sign", lambda k: -orig(k) if k == 3 else orig(k))
    L = build_observables(r3_volume)
    rng = random.Random(2)
    assert not all(check_generalized_jacobi(L, m, sample_tuples(L, m, 20, rng)).passed for m in (3, 4))


# --- the KKS cocycle -----------------------------------------------------------------


@pytest.mark.parametrize("name", PATCHES)
def test_kks_is_a_morphism(request, name):
    P = _patch(request, name)
    F = kks_cocycle(P)
    rng = random.Random(11)
    for m in range(1, P.n + 2):
        res = check_morphism(F, m, sample_tuples(F.source, m, 10, rng))
        assert res.passed, res.failures[:1]


@pytest.mark.parametrize("k0", [2, 3])
def test_flipped_kks_sign_is_caught(monkeypatch, r3_volume, k0):
    orig = ob.kks_sign
    monkeypatch.setattr(ob, "kks_sign", lambda k: -orig(k) if k == k0 else orig(k))
    F = kks_cocycle(r3_volume)
    rng = random.Random(4)
    assert not all(check_morphism(F, m, sample_tuples(F.source, m, 10, rng)).passed for m in range(1, 5))


def test_kks_values(r3_volume):
    dx, dy, dz = unit_fields(R3)
    F = kks_cocycle(r3_volume)
    e = [GradedElement(0, {"v": v}) for v in (dx, dy, dz)]
    assert F.component(1, e[0]).get("form") == PolyForm.parse("-dy^dz", R3)
    assert F.component(2, e[0], e[1]).get("form") == PolyForm.parse("dz", R3)
    assert F.component(3, *e).get("form") == PolyForm.parse("1", R3, 0)


@pytest.mark.parametrize("name", PATCHES)
def test_contraction_identity_on_hamiltonian_fields(request, name):
    P = _patch(request, name)
    fields = P.hamiltonian_fields(2)
    zero = PolyMultivector.zero(P.patch, 1)
    rng = random.Random(5)
    for k in range(1, P.n + 2):
        for _ in range(4):
            vs = [rand_combination(rng, fields, zero) for _ in range(k)]
            assert kks_identity_residual(P, vs).is_zero()


def test_contraction_identity_fails_for_generic_fields(r3_volume):
    rng = random.Random(6)
    vs = [rand_vector_field(rng, R3, 2) for _ in range(2)]
    assert not kks_identity_residual(r3_volume, vs).is_zero()


@pytest.mark.parametrize("name", PATCHES)
def test_fiber_square(request, name):
    P = _patch(request, name)
    D = kks_fiber_data(P, field_degree=1)
    rng = random.Random(3)
    L = D.observables
    top = P.n + 2
    for m in range(1, top):
        assert check_morphism(D.lift, m, sample_tuples(L, m, 6, rng)).passed
    samples = {m: sample_tuples(L, m, 6, rng) for m in range(1, top)}
    square = check_equal_morphisms(
        compose(D.cone_projection, D.lift), compose(D.kks, D.projection_fields), range(1, top), samples, "square"
    )
    assert square.passed
    T = D.truncated
    hyp = check_fiber_hypotheses(T["projection"], T["cone"], square, T["kks_linear"], T["observables"], T["comparison"])
    assert hyp.fibration and hyp.acyclic and hyp.square_commutes and hyp.pullback


# --- finite dimensional Lie algebras -------------------------------------------------


def _ad_matrix_oracle(consts: dict, dim: int, i: int) -> sympy.Matrix:
    """Matrix of ad(e_i) from antisymmetrized structure constants."""
    full = {}
    for (a, b), vec in consts.items():
        full[(a, b)] = vec
        full[(b, a)] = {k: -c for k, c in vec.items()}
    return sympy.Matrix(dim, dim, lambda r, j: full.get((i, j), {}).get(r, 0))


SU2 = {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}


def test_su2_killing_form_from_traces():
    g = FDLieAlgebra.su2()
    for i, j in itertools.product(range(3), repeat=2):
        oracle = (_ad_matrix_oracle(SU2, 3, i) * _ad_matrix_oracle(SU2, 3, j)).trace()
        assert g.killing(i, j) == oracle == (-2 if i == j else 0)


def test_string_cocycle_values():
    g = FDLieAlgebra.su2()
    mu = string_cocycle(g)
    assert mu(0, 1, 2) == -2
    for p in itertools.permutations(range(3)):
        assert mu(*p) == -2 * perm_sign(p)
    assert g.is_cocycle(mu, 3)


def test_string_lie2_jacobi():
    g = FDLieAlgebra.su2()
    L = string_lie2(g)
    rng = random.Random(8)
    for m in range(1, 5):
        assert check_generalized_jacobi(L, m, sample_tuples(L, m, 20, rng)).passed
    basis = [GradedElement(0, {i: mpq(1)}) for i in range(3)]
    assert L.bracket(3, *basis).parts == {0: mpq(2)}


def test_non_alternating_cochain_fails():
    g = FDLieAlgebra.su2()
    bad = lambda i, j, k: 1 if (i, j, k) == (0, 1, 2) else 0  # noqa: E731
    assert not g.is_cocycle(bad, 3)
    L = string_lie2(g, bad)
    assert not check_generalized_jacobi(L, 4, sample_tuples(L, 4, 20, random.Random(0))).passed


def test_non_cocycle_two_cochain():
    g = FDLieAlgebra(4, SU2)
    c = lambda i, j: {(0, 3): 1, (3, 0): -1}.get((i, j), 0)  # noqa: E731
    assert not g.is_cocycle(c, 2)


def test_heisenberg_extension(r2_poisson):
    g = FDLieAlgebra.abelian(2)
    c = restrict_cocycle(r2_poisson, g, unit_fields(R2))
    assert c(0, 1) == 1 and c(1, 0) == -1 and c(0, 0) == 0
    assert g.is_cocycle(c, 2)
    ext = g.central_extension(lambda i, j: c(i, j))
    assert ext.dim == 3
    assert ext.check_jacobi()
    assert ext.bracket(ext.basis(0), ext.basis(1)) == [0, 0, 1]
    for i in range(3):
        assert ext.bracket(ext.basis(i), ext.basis(2)) == [0, 0, 0]


@given(st.lists(st.integers(-3, 3), min_size=3, max_size=3), st.lists(st.integers(-3, 3), min_size=3, max_size=3))
def test_su2_bracket_antisymmetric(a, b):
    g = FDLieAlgebra.su2()
    assert g.bracket(a, b) == [-t for t in g.bracket(b, a)]
