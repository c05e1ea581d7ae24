from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from prequant.algebra import Poly, VariableMismatchError
from prequant.forms import (
    DegreeError,
    PolyForm,
    PolyMultivector,
    check_cartan_commutator,
    check_extended_cartan,
    check_homotopy_identity,
    contract,
    d,
    euler_field,
    interior,
    lie,
    poincare_homotopy,
    schouten,
    wedge,
)

import symbolic_oracle as so
from conftest import R2, R3, R4, any_form, forms, multivectors, unit_fields, vector_fields

S3 = so.symbols(R3)


# --- agreement with the sympy oracle -------------------------------------------------


@given(any_form(R3))
def test_d_matches_oracle(a):
    assert so.equal(so.to_sym(d(a), S3), so.d(so.to_sym(a, S3), S3))


@given(any_form(R3), any_form(R3))
def test_wedge_matches_oracle(a, b):
    if a.degree + b.degree > 3:
        return
    assert so.equal(so.to_sym(wedge(a, b), S3), so.wedge(so.to_sym(a, S3), so.to_sym(b, S3)))


@given(vector_fields(R3), st.integers(1, 3).flatmap(lambda k: forms(R3, k)))
def test_interior_and_lie_match_oracle(v, a):
    sv, sa = so.to_sym(v, S3), so.to_sym(a, S3)
    assert so.equal(so.to_sym(interior(v, a), S3), so.interior(sv, sa))
    assert so.equal(so.to_sym(lie(v, a), S3), so.lie(sv, sa, S3))


@given(st.lists(vector_fields(R3, 1), min_size=1, max_size=3), forms(R3, 3, 1))
def test_contract_applies_first_field_first(vs, a):
    expected = so.contract([so.to_sym(v, S3) for v in vs], so.to_sym(a, S3))
    assert so.equal(so.to_sym(contract(vs, a), S3), expected)


@given(vector_fields(R3), vector_fields(R3))
def test_schouten_on_vectors_is_lie_bracket(u, v):
    expected = so.bracket(so.to_sym(u, S3), so.to_sym(v, S3), S3)
    assert so.equal(so.to_sym(schouten(u, v), S3), expected)


# --- structural identities -----------------------------------------------------------


@given(any_form(R4, 3))
def test_d_squared_vanishes(a):
    if a.degree <= 2:
        assert d(d(a)).is_zero()


@given(any_form(R4), any_form(R4))
def test_graded_commutativity(a, b):
    if a.degree + b.degree <= 4:
        assert wedge(a, b) == wedge(b, a) * (-1) ** (a.degree * b.degree)


@given(any_form(R3), any_form(R3))
def test_leibniz_rule(a, b):
    if a.degree + b.degree <= 2:
        assert d(wedge(a, b)) == wedge(d(a), b) + wedge(a, d(b)) * (-1) ** a.degree


@given(any_form(R3))
def test_poincare_homotopy_identity(a):
    assert check_homotopy_identity(a)


@given(
    st.integers(1, 2).flatmap(lambda k: multivectors(R3, k, 1)),
    st.integers(1, 2).flatmap(lambda k: multivectors(R3, k, 1)),
    st.integers(0, 3).flatmap(lambda k: forms(R3, k, 2)),
)
def test_cartan_commutator_for_multivectors(u, v, a):
    assert check_cartan_commutator(u, v, a)


@given(st.data())
def test_extended_cartan_formula(data):
    beta = data.draw(st.integers(0, 3).flatmap(lambda k: forms(R4, k, 2)))
    vs = data.draw(st.lists(vector_fields(R4, 1), min_size=1, max_size=beta.degree + 1))
    assert check_extended_cartan(vs, beta)


def test_extended_cartan_rejects_too_many_fields():
    with pytest.raises(DegreeError):
        check_extended_cartan(unit_fields(R2), PolyForm.parse("x", R2, 0))


@given(vector_fields(R3, 1), vector_fields(R3, 1), vector_fields(R3, 1))
def test_schouten_jacobi_on_vectors(u, v, w):
    total = schouten(u, schouten(v, w)) + schouten(v, schouten(w, u)) + schouten(w, schouten(u, v))
    assert total.is_zero()


@given(multivectors(R3, 2, 1), multivectors(R3, 1, 1))
def test_schouten_graded_antisymmetry(u, v):
    # [u, v] = -(-1)^((|u|-1)(|v|-1)) [v, u]
    assert schouten(u, v) == schouten(v, u) * (-(-1) ** ((u.degree - 1) * (v.degree - 1)))


# --- frozen examples -----------------------------------------------------------------


def test_homotopy_of_area_form():
    h = poincare_homotopy(PolyForm.parse("dx^dy", R2))
    assert h == PolyForm.parse("-1/2*y dx + 1/2*x dy", R2)


def test_schouten_example():
    x, y = (Poly.var(n, R3.names) for n in ("x", "y"))
    u = PolyMultivector.vector(R3, [x, 0, 0])
    v = PolyMultivector.vector(R3, [0, x * y, 0])
    assert schouten(u, v) == PolyMultivector.vector(R3, [0, x * y, 0])


def test_contraction_convention():
    dx, dy, dz = unit_fields(R3)
    assert contract([dx, dy], PolyForm.parse("dx^dy", R3)) == PolyForm.parse("1", R3, 0)
    assert contract([dy, dx], PolyForm.parse("dx^dy", R3)) == PolyForm.parse("-1", R3, 0)
    assert interior(wedge(dx, dy), PolyForm.parse("dx^dy^dz", R3)) == PolyForm.parse("dz", R3)


def test_lie_derivative_example():
    x = Poly.var("x", R3.names)
    assert lie(PolyMultivector.vector(R3, [x, 0, 0]), PolyForm.parse("x dy", R3)) == PolyForm.parse("x dy", R3)
    assert d(PolyForm.parse("x*y dz", R3)) == PolyForm.parse("y dx^dz + x dy^dz", R3)


def test_euler_field_scales_by_weight():
    # L_E of a homogeneous form of polynomial degree p and form degree k is (p + k) times it
    a = PolyForm.parse("x*y dz", R3)
    assert lie(euler_field(R3), a) == a * 3


# --- errors --------------------------------------------------------------------------


def test_degree_out_of_range():
    with pytest.raises(DegreeError):
        PolyForm.zero(R2, 3)


def test_adding_forms_of_different_degree_fails():
    with pytest.raises(DegreeError):
        PolyForm.parse("dx", R2) + PolyForm.parse("dx^dy", R2)


def test_patch_mismatch_fails():
    with pytest.raises(VariableMismatchError):
        wedge(PolyForm.parse("dx", R2), PolyForm.parse("dx", R3))


def test_schouten_rejects_functions():
    with pytest.raises(DegreeError):
        schouten(PolyMultivector.scalar(R2, 1), unit_fields(R2)[0])
