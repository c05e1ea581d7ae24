"""Atiyah and Courant algebras of a closed 2- or 3-form and their Cech models.

Elements reuse the part names of the observables: ``"v"`` for a vector field,
``"form"`` for a global form and ``"tot"`` for a total-complex cochain.

n = 1
    ``atiyah1``: vector fields plus functions with
    ``[v1 + c1, v2 + c2] = [v1, v2] + L_v1 c2 - L_v2 c1 - iota(v1^v2) omega``;
    ``lie_algebra_at``: pairs ``v + t`` with ``L_v A^0 = delta t`` and the
    bracket ``[v1, v2] + L_v1 t2 - L_v2 t1``; ``atiyah_iso`` sends
    ``v + c`` to ``v - res(c) + iota_v A^1``.

n = 2
    ``atiyah2``, ``courant2`` (two-term algebras with a ternary bracket), the
    morphisms ``phi`` (observables to Courant) and ``psi`` (Courant to
    Atiyah), the form-degree truncated dg Lie algebras with maps ``i`` and
    ``p``, and the equivalences ``f^c``, ``f^a``.
"""

from __future__ import annotations

import random
from typing import Sequence

from gmpy2 import mpq

from .cech import (
    Cover,
    DeligneCocycle,
    TotElement,
    TotSpace,
    cech_delta,
    d_tot,
    iota_tot,
    lie_tot,
    require_cocycle,
    res,
)
from .forms import PolyForm, PolyMultivector, contract, d, interior, lie, schouten
from .linfty import GradedElement, LInftyMorphism, LInftyStructure, compose_low
from .observables import PrePlecticPatch, build_observables
from .quantization import quantomorphism_morphism, dglie_qu, rand_tot
from .sampling import rand_form, rand_vector_field
from .truncation import GradedSlice, GradedSpace, SumSpace, constrained_slice, slice_chain_map

__all__ = [
    "atiyah1",
    "lie_algebra_at",
    "atiyah_iso",
    "observables_into_atiyah1",
    "quantization_into_at",
    "atiyah_iso_slices",
    "pairing",
    "atiyah2",
    "courant2",
    "phi_morphism",
    "psi_morphism",
    "dglie_truncated",
    "inclusion_i",
    "projection_p",
    "fc_morphism",
    "fa_morphism",
    "diagram_morphisms",
    "psi_identities",
    "fc_fa_identities",
    "equivalence_slices",
    "kernel_residual",
    "in_truncated_degree_zero",
]

HALF = mpq(1, 2)


def _v(x: GradedElement, patch) -> PolyMultivector | None:
    return x.get("v")


def _f(x: GradedElement, patch, deg: int) -> PolyForm:
    f = x.get("form")
    return f if f is not None else PolyForm.zero(patch, deg)


def _t(x: GradedElement, cover: Cover, deg: int) -> TotElement:
    t = x.get("tot")
    return t if t is not None else TotElement.zero(cover, deg)


def _lie(v: PolyMultivector | None, a: PolyForm) -> PolyForm:
    if v is None:
        return PolyForm.zero(a.patch, a.degree)
    return lie(v, a)


def _sample_field(rng: random.Random, patch, max_deg: int) -> PolyMultivector:
    return rand_vector_field(rng, patch, max_deg, 2)


def _check_omega(P: PrePlecticPatch, n: int) -> None:
    if P.n != n:
        raise ValueError(f"this construction needs a closed {n + 1}-form, got degree {P.omega.degree}")


# ---------------------------------------------------------------------------
# n = 1
# ---------------------------------------------------------------------------


def atiyah1(P: PrePlecticPatch, max_deg: int = 2) -> LInftyStructure:
    _check_omega(P, 1)
    patch, omega = P.patch, P.omega

    def l2(x, y):
        v1, v2 = _v(x, patch), _v(y, patch)
        c1, c2 = _f(x, patch, 0), _f(y, patch, 0)
        c = PolyForm.zero(patch, 0)
        if v1 is not None:
            c = c + lie(v1, c2)
        if v2 is not None:
            c = c - lie(v2, c1)
        v = None
        if v1 is not None and v2 is not None:
            v = schouten(v1, v2)
            c = c - contract([v1, v2], omega)
        return GradedElement(0, {"v": v, "form": c})

    def sampler(rng, deg):
        return GradedElement(0, {"v": _sample_field(rng, patch, max_deg), "form": rand_form(rng, patch, 0, max_deg)})

    return LInftyStructure(f"atiyah1[{P.name}]", 0, {2: l2}, sampler)


def lie_algebra_at(P: PrePlecticPatch, cocycle: DeligneCocycle, max_deg: int = 2) -> LInftyStructure:
    """Pairs v + t, t a Cech 0-cochain of functions with L_v A^0 = delta t."""
    _check_omega(P, 1)
    require_cocycle(cocycle, P.omega)
    cover = cocycle.cover

    def l2(x, y):
        v1, v2 = x.get("v"), y.get("v")
        t = TotElement.zero(cover, 0)
        if v1 is not None:
            t = t + lie_tot(v1, _t(y, cover, 0))
        if v2 is not None:
            t = t - lie_tot(v2, _t(x, cover, 0))
        v = schouten(v1, v2) if v1 is not None and v2 is not None else None
        return GradedElement(0, {"v": v, "tot": t})

    L = LInftyStructure(f"lie_at[{P.name}]", 0, {2: l2})
    src = atiyah1(P, max_deg)
    iso = atiyah_iso(P, cocycle, src, L)
    L.sampler = lambda rng, deg: iso.component(1, src.sample(rng, 0))
    return L


def atiyah_iso(P: PrePlecticPatch, cocycle: DeligneCocycle, source=None, target=None) -> LInftyMorphism:
    """v + c  ->  v - res(c) + iota_v A^1."""
    require_cocycle(cocycle, P.omega)
    cover = cocycle.cover
    A1 = cocycle.part(0)
    source = source or atiyah1(P)
    target = target or lie_algebra_at(P, cocycle)

    def f1(x):
        v = x.get("v")
        t = -res(cover, _f(x, P.patch, 0))
        if v is not None:
            t = t + iota_tot([v], A1)
        return GradedElement(0, {"v": v, "tot": t})

    return LInftyMorphism(f"psi[{P.name}]", source, target, {1: f1})


def observables_into_atiyah1(P: PrePlecticPatch, obs=None, at=None) -> LInftyMorphism:
    obs = obs or build_observables(P)
    at = at or atiyah1(P)
    return LInftyMorphism("incl", obs, at, {1: lambda x: x})


def quantization_into_at(P: PrePlecticPatch, cocycle: DeligneCocycle, qu=None, at=None) -> LInftyMorphism:
    qu = qu or dglie_qu(P, cocycle)
    at = at or lie_algebra_at(P, cocycle)
    return LInftyMorphism("incl", qu, at, {1: lambda x: x})


def atiyah_iso_slices(P: PrePlecticPatch, cocycle: DeligneCocycle, field_degree: int = 1, weight: int | None = None) -> dict:
    """Rank test of the n = 1 isomorphism on finite slices.

    Returns source and target dimensions and the rank of the matrix.
    """
    from . import linalg
    from .truncation import matrix_of

    _check_omega(P, 1)
    patch, cover = P.patch, cocycle.cover
    wA = max((f.weight() for f in cocycle.A.data.values()), default=0)
    W = weight if weight is not None else wA - 1 + field_degree
    VF = GradedSpace.vector_fields(patch, field_degree)
    src = GradedSlice(SumSpace([("v", VF), ("form", GradedSpace.forms(patch, 0, W))]), 0)
    amb = GradedSlice(SumSpace([("v", VF), ("tot", TotSpace(cover, 0, W))]), 0)
    cod = GradedSlice(SumSpace([("tot", TotSpace(cover, 1, W + field_degree + 1))]), 0)
    A0 = cocycle.part(1)

    def constraint(x):
        v = x.get("v")
        t = lie_tot(v, A0) if v is not None else TotElement.zero(cover, 1)
        return GradedElement(0, {"tot": t - cech_delta(_t(x, cover, 0))})

    tgt = constrained_slice(amb, constraint, cod)
    iso = atiyah_iso(P, cocycle)
    M = matrix_of(lambda x: iso.component(1, x), src, tgt)
    rank = linalg.rank(M)
    return {"source_dim": src.dim, "target_dim": tgt.dim, "rank": rank,
            "bijective": rank == src.dim == tgt.dim, "weight": W}


# ---------------------------------------------------------------------------
# n = 2: Atiyah and Courant two-term algebras
# ---------------------------------------------------------------------------


def pairing(x: GradedElement, y: GradedElement, patch) -> PolyForm:
    """<v1 + t1, v2 + t2> = iota_v1 t2 + iota_v2 t1."""
    out = PolyForm.zero(patch, 0)
    v1, v2 = x.get("v"), y.get("v")
    t1, t2 = x.get("form"), y.get("form")
    if v1 is not None and t2 is not None:
        out = out + interior(v1, t2)
    if v2 is not None and t1 is not None:
        out = out + interior(v2, t1)
    return out


def atiyah2(P: PrePlecticPatch, max_deg: int = 2) -> LInftyStructure:
    _check_omega(P, 2)
    patch, omega = P.patch, P.omega

    def l2(x, y):
        if x.degree == 0 and y.degree == 0:
            return GradedElement(0, {"v": schouten(x.get("v"), y.get("v"))})
        if x.degree == 0:
            return GradedElement(1, {"form": lie(x.get("v"), y.get("form"))})
        return GradedElement(1, {"form": -lie(y.get("v"), x.get("form"))})

    def l3(x, y, z):
        return GradedElement(1, {"form": -contract([x.get("v"), y.get("v"), z.get("v")], omega)})

    def sampler(rng, deg):
        if deg == 0:
            return GradedElement(0, {"v": _sample_field(rng, patch, max_deg)})
        return GradedElement(1, {"form": rand_form(rng, patch, 0, max_deg)})

    return LInftyStructure(f"atiyah2[{P.name}]", 1, {2: l2, 3: l3}, sampler)


def _courant_l2_zero(x, y, P: PrePlecticPatch) -> GradedElement:
    patch = P.patch
    v1, v2 = x.get("v"), y.get("v")
    t1, t2 = _f(x, patch, 1), _f(y, patch, 1)
    form = _lie(v1, t2) - _lie(v2, t1)
    skew = PolyForm.zero(patch, 0)
    if v1 is not None:
        skew = skew + interior(v1, t2)
    if v2 is not None:
        skew = skew - interior(v2, t1)
    form = form - d(skew) * HALF
    v = None
    if v1 is not None and v2 is not None:
        v = schouten(v1, v2)
        form = form - contract([v1, v2], P.omega)
    return GradedElement(0, {"v": v, "form": form})


def courant2(P: PrePlecticPatch, max_deg: int = 2) -> LInftyStructure:
    """l_1 = d on functions, the skew Courant bracket and the cyclic ternary bracket."""
    _check_omega(P, 2)
    patch = P.patch

    def l1(x):
        return GradedElement(0, {"form": d(x.get("form"))})

    def l2(x, y):
        if x.degree == 0 and y.degree == 0:
            return _courant_l2_zero(x, y, P)
        if x.degree == 0:
            v = x.get("v")
            if v is None:
                return None
            return GradedElement(1, {"form": interior(v, d(y.get("form"))) * HALF})
        v = y.get("v")
        if v is None:
            return None
        return GradedElement(1, {"form": -interior(v, d(x.get("form"))) * HALF})

    def l3(x, y, z):
        total = PolyForm.zero(patch, 0)
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            total = total + pairing(_courant_l2_zero(a, b, P), c, patch)
        return GradedElement(1, {"form": total * mpq(-1, 6)})

    def sampler(rng, deg):
        if deg == 0:
            return GradedElement(
                0, {"v": _sample_field(rng, patch, max_deg), "form": rand_form(rng, patch, 1, max_deg)}
            )
        return GradedElement(1, {"form": rand_form(rng, patch, 0, max_deg)})

    return LInftyStructure(f"courant2[{P.name}]", 1, {1: l1, 2: l2, 3: l3}, sampler)


def _half_skew(x, y, patch) -> PolyForm:
    """-1/2 (iota_v1 t2 - iota_v2 t1)."""
    out = PolyForm.zero(patch, 0)
    v1, v2 = x.get("v"), y.get("v")
    t1, t2 = x.get("form"), y.get("form")
    if v1 is not None and t2 is not None:
        out = out + interior(v1, t2)
    if v2 is not None and t1 is not None:
        out = out - interior(v2, t1)
    return out * (-HALF)


def phi_morphism(P: PrePlecticPatch, obs=None, cou=None) -> LInftyMorphism:
    obs = obs or build_observables(P)
    cou = cou or courant2(P)

    def f2(x, y):
        if x.degree or y.degree:
            return None
        return GradedElement(1, {"form": _half_skew(x, y, P.patch)})

    return LInftyMorphism("phi", obs, cou, {1: lambda x: x, 2: f2})


def psi_morphism(P: PrePlecticPatch, cou=None, at=None) -> LInftyMorphism:
    cou = cou or courant2(P)
    at = at or atiyah2(P)

    def f1(x):
        if x.degree == 0:
            return GradedElement(0, {"v": x.get("v")})
        return x

    def f2(x, y):
        if x.degree or y.degree:
            return None
        return GradedElement(1, {"form": _half_skew(x, y, P.patch)})

    return LInftyMorphism("psi", cou, at, {1: f1, 2: f2})


# ---------------------------------------------------------------------------
# n = 2: truncated dg Lie algebras
# ---------------------------------------------------------------------------

LEVELS = {"courant": 1, "atiyah": 0}


def dglie_truncated(
    P: PrePlecticPatch, cocycle: DeligneCocycle, level: str, max_deg: int = 1, sample_from=None
) -> LInftyStructure:
    """Cochains with forms of degree <= 1 (courant) or 0 (atiyah).

    Degree zero: ``v + t`` with ``t`` of total degree 1 and
    ``L_v`` (the cocycle without its top part, truncated) ``= d_tot t``.
    """
    _check_omega(P, 2)
    if level not in LEVELS:
        raise ValueError(f"unknown level {level!r}; expected one of {sorted(LEVELS)}")
    require_cocycle(cocycle, P.omega)
    cut = LEVELS[level]
    cover = cocycle.cover

    def l1(x):
        return GradedElement(0, {"tot": d_tot(_t(x, cover, 0), cut)})

    def l2(x, y):
        v1, v2 = x.get("v"), y.get("v")
        deg = x.degree + y.degree
        t = TotElement.zero(cover, 1 - deg)
        if v1 is not None:
            t = t + lie_tot(v1, _t(y, cover, 1 - y.degree))
        if v2 is not None:
            t = t - lie_tot(v2, _t(x, cover, 1 - x.degree))
        v = schouten(v1, v2) if v1 is not None and v2 is not None else None
        return GradedElement(deg, {"v": v, "tot": t.truncate(cut)})

    L = LInftyStructure(f"dglie_{level}[{P.name}]", 1, {1: l1, 2: l2}, info={"cut": cut})

    def sampler(rng, deg):
        if deg == 1:
            return GradedElement(1, {"tot": rand_tot(rng, cover, 0, max_deg)})
        if sample_from is None:
            raise ValueError("degree zero sampling needs a source morphism")
        F, src = sample_from
        x = F.component(1, src.sample(rng, 0))
        return x + l1(GradedElement(1, {"tot": rand_tot(rng, cover, 0, max_deg)}))

    L.sampler = sampler
    return L


def in_truncated_degree_zero(L: LInftyStructure, cocycle: DeligneCocycle, x: GradedElement) -> bool:
    cut = L.info["cut"]
    cover = cocycle.cover
    A = TotElement(cover, 2, {s: f for s, f in cocycle.A.data.items() if len(s) > 1})
    v = x.get("v")
    lhs = lie_tot(v, A).truncate(cut) if v is not None else TotElement.zero(cover, 2)
    return (lhs - d_tot(_t(x, cover, 1), cut)).is_zero()


def inclusion_i(qu: LInftyStructure, cou: LInftyStructure) -> LInftyMorphism:
    return LInftyMorphism("i", qu, cou, {1: lambda x: x})


def projection_p(cou: LInftyStructure, at: LInftyStructure) -> LInftyMorphism:
    def p1(x):
        t = x.get("tot")
        return GradedElement(x.degree, {"v": x.get("v"), "tot": t.truncate(0) if t is not None else None})

    return LInftyMorphism("p", cou, at, {1: p1})


def _a2_minus_a1(cocycle: DeligneCocycle) -> TotElement:
    return cocycle.part(0) - cocycle.part(1)


def fc_morphism(P: PrePlecticPatch, cocycle: DeligneCocycle, cou_src=None, cou_tgt=None) -> LInftyMorphism:
    """f^c_1(v + t) = v - t + iota_v(A^2 - A^1), f^c_1(e) = -e,
    f^c_2 = 1/2 (iota_v1 t2 - iota_v2 t1) + iota(v1^v2) A^2."""
    require_cocycle(cocycle, P.omega)
    cover = cocycle.cover
    cou_src = cou_src or courant2(P)
    A2, twisted = cocycle.part(0), _a2_minus_a1(cocycle)

    def f1(x):
        if x.degree == 1:
            return GradedElement(1, {"tot": -res(cover, x.get("form"))})
        v = x.get("v")
        t = -res(cover, _f(x, P.patch, 1))
        if v is not None:
            t = t + iota_tot([v], twisted)
        return GradedElement(0, {"v": v, "tot": t})

    def f2(x, y):
        if x.degree or y.degree:
            return None
        t = res(cover, _half_skew(x, y, P.patch) * -1)
        v1, v2 = x.get("v"), y.get("v")
        if v1 is not None and v2 is not None:
            t = t + iota_tot([v1, v2], A2)
        return GradedElement(1, {"tot": t})

    F = LInftyMorphism(f"fc[{P.name}]", cou_src, None, {1: f1, 2: f2})
    F.target = cou_tgt or dglie_truncated(P, cocycle, "courant", sample_from=(F, cou_src))
    return F


def fa_morphism(P: PrePlecticPatch, cocycle: DeligneCocycle, at_src=None, at_tgt=None) -> LInftyMorphism:
    """f^a_1(v) = v - iota_v A^1, f^a_1(e) = -e, f^a_2 = iota(v1^v2) A^2."""
    require_cocycle(cocycle, P.omega)
    cover = cocycle.cover
    at_src = at_src or atiyah2(P)
    A2, A1 = cocycle.part(0), cocycle.part(1)

    def f1(x):
        if x.degree == 1:
            return GradedElement(1, {"tot": -res(cover, x.get("form"))})
        v = x.get("v")
        t = -iota_tot([v], A1) if v is not None else TotElement.zero(cover, 1)
        return GradedElement(0, {"v": v, "tot": t})

    def f2(x, y):
        if x.degree or y.degree:
            return None
        return GradedElement(1, {"tot": iota_tot([x.get("v"), y.get("v")], A2)})

    F = LInftyMorphism(f"fa[{P.name}]", at_src, None, {1: f1, 2: f2})
    F.target = at_tgt or dglie_truncated(P, cocycle, "atiyah", sample_from=(F, at_src))
    return F


def diagram_morphisms(P: PrePlecticPatch, cocycle: DeligneCocycle, max_deg: int = 1) -> dict:
    """Every algebra and morphism of the n = 2 ladder, wired to shared objects."""
    obs = build_observables(P, max_deg)
    cou = courant2(P, max_deg)
    at = atiyah2(P, max_deg)
    qu = dglie_qu(P, cocycle, max_deg)
    f = quantomorphism_morphism(P, cocycle, obs, qu)
    fc = fc_morphism(P, cocycle, cou)
    fa = fa_morphism(P, cocycle, at)
    Cou, At = fc.target, fa.target
    phi = phi_morphism(P, obs, cou)
    psi = psi_morphism(P, cou, at)
    i = inclusion_i(qu, Cou)
    p = projection_p(Cou, At)
    return {
        "observables": obs, "courant": cou, "atiyah": at, "qu": qu, "cou": Cou, "at": At,
        "f": f, "fc": fc, "fa": fa, "phi": phi, "psi": psi, "i": i, "p": p,
        "fc.phi": compose_low(fc, phi), "i.f": compose_low(i, f),
        "fa.psi": compose_low(fa, psi), "p.fc": compose_low(p, fc),
        "fa.psi.phi": compose_low(compose_low(fa, psi), phi),
        "p.i.f": compose_low(compose_low(p, i), f),
    }


# ---------------------------------------------------------------------------
# closed-form identities used to show the morphism property
# ---------------------------------------------------------------------------


def _cyc(xs):
    a, b, c = xs
    return ((a, b, c), (b, c, a), (c, a, b))


def _lie_terms(xs, patch) -> PolyForm:
    """iota_v3 L_v1 t2 - iota_v3 L_v2 t1 + cyclic."""
    out = PolyForm.zero(patch, 0)
    for a, b, c in _cyc(xs):
        v1, v2, v3 = a.get("v"), b.get("v"), c.get("v")
        t1, t2 = _f(a, patch, 1), _f(b, patch, 1)
        if v3 is None:
            continue
        out = out + interior(v3, _lie(v1, t2)) - interior(v3, _lie(v2, t1))
    return out


def _dtheta_terms(xs, patch) -> PolyForm:
    """iota(v1^v2) d t3 + cyclic."""
    out = PolyForm.zero(patch, 0)
    for a, b, c in _cyc(xs):
        v1, v2 = a.get("v"), b.get("v")
        if v1 is None or v2 is None:
            continue
        out = out + contract([v1, v2], d(_f(c, patch, 1)))
    return out


def psi_identities(P: PrePlecticPatch, xs: Sequence[GradedElement], eta: GradedElement) -> dict[str, object]:
    """Residuals (left minus right) of the identities behind psi being a morphism.

    ``xs`` are three degree-zero Courant elements and ``eta`` a degree-one one.
    """
    patch, omega = P.patch, P.omega
    cou, at = courant2(P), atiyah2(P)
    psi = psi_morphism(P, cou, at)
    x1, x2, x3 = xs
    vs = [x.get("v") for x in xs]
    top = contract(vs, omega) if all(v is not None for v in vs) else PolyForm.zero(patch, 0)
    out = {}

    # chain map: psi_1 l_1 = l_1 psi_1 (the target differential vanishes)
    out["chain map"] = psi.component(1, cou.bracket(1, eta))

    deta = GradedElement(0, {"form": d(eta.get("form"))})
    lhs = psi.component(2, deta, x1)
    rhs = psi.component(1, cou.bracket(2, eta, x1)) - at.bracket(2, psi.component(1, eta), psi.component(1, x1))
    out["differential against psi_2"] = lhs - rhs

    lhs = cou.bracket(3, x1, x2, x3).get("form") or PolyForm.zero(patch, 0)
    rhs = _lie_terms(xs, patch) * mpq(-1, 4) + top * HALF
    out["ternary closed form"] = lhs - rhs

    lhs = PolyForm.zero(patch, 0)
    for a, b, c in _cyc(xs):
        lhs = lhs + (psi.component(2, cou.bracket(2, a, b), c).get("form") or PolyForm.zero(patch, 0))
    rhs = _lie_terms(xs, patch) * mpq(-1, 4) - _dtheta_terms(xs, patch) - top * mpq(3, 2)
    out["psi_2 of brackets"] = lhs - rhs

    lhs = PolyForm.zero(patch, 0)
    for a, b, c in _cyc(xs):
        lhs = lhs + (at.bracket(2, psi.component(1, a), psi.component(2, b, c)).get("form") or PolyForm.zero(patch, 0))
    rhs = _lie_terms(xs, patch) * mpq(-1, 2) - _dtheta_terms(xs, patch)
    out["brackets with psi_2"] = lhs - rhs
    return out


def fc_fa_identities(P: PrePlecticPatch, cocycle: DeligneCocycle, xs: Sequence[GradedElement]) -> dict[str, object]:
    """Residuals of the six bracket identities behind f^c and f^a.

    ``xs`` are three degree-zero Courant elements; the Atiyah identities use
    their vector fields.
    """
    patch, omega, cover = P.patch, P.omega, cocycle.cover
    A2, A1 = cocycle.part(0), cocycle.part(1)
    mor = diagram_morphisms(P, cocycle)
    cou, at, Cou, At, fc, fa = mor["courant"], mor["atiyah"], mor["cou"], mor["at"], mor["fc"], mor["fa"]
    x1, x2, x3 = xs
    v1, v2, v3 = [x.get("v") for x in xs]
    br = schouten(v1, v2)
    out = {}

    def tot_of(y, deg):
        return _t(y, cover, deg)

    # f^c_1 bracket
    lhs = Cou.bracket(2, fc.component(1, x1), fc.component(1, x2))
    t1, t2 = _f(x1, patch, 1), _f(x2, patch, 1)
    rhs_t = (
        res(cover, -lie(v1, t2) + lie(v2, t1) + contract([v1, v2], omega))
        + iota_tot([br], _a2_minus_a1(cocycle))
        - d_tot(iota_tot([v1, v2], A2), 1)
    )
    out["courant: f1 bracket"] = _diff(lhs, br, rhs_t, 0, cover)

    def cyc_sum(fn):
        acc = TotElement.zero(cover, 0)
        for a, b, c in _cyc(xs):
            val = fn(a, b, c)
            acc = acc + tot_of(val, 0)
        return acc

    top = contract([v1, v2, v3], omega)
    bracket_A2 = TotElement.zero(cover, 0)
    lieA2 = TotElement.zero(cover, 0)
    for a, b, c in _cyc(xs):
        u1, u2, u3 = a.get("v"), b.get("v"), c.get("v")
        bracket_A2 = bracket_A2 + iota_tot([schouten(u1, u2), u3], A2)
        lieA2 = lieA2 + iota_tot([u2, u3], lie_tot(u1, A2))

    lhs = cyc_sum(lambda a, b, c: fc.component(2, cou.bracket(2, a, b), c))
    rhs = res(cover, _lie_terms(xs, patch) * mpq(1, 4) + _dtheta_terms(xs, patch) + top * mpq(3, 2)) + bracket_A2
    out["courant: f2 of brackets"] = lhs - rhs

    lhs = cyc_sum(lambda a, b, c: Cou.bracket(2, fc.component(1, a), fc.component(2, b, c)))
    rhs = res(cover, _lie_terms(xs, patch) * HALF + _dtheta_terms(xs, patch)) + bracket_A2 * 2 + lieA2
    out["courant: brackets with f2"] = lhs - rhs

    y1, y2, y3 = [GradedElement(0, {"v": v}) for v in (v1, v2, v3)]
    lhs = At.bracket(2, fa.component(1, y1), fa.component(1, y2))
    rhs_t = -iota_tot([br], A1) - d_tot(iota_tot([v1, v2], A2), 0)
    out["atiyah: f1 bracket"] = _diff(lhs, br, rhs_t, 0, cover)

    ys = (y1, y2, y3)
    acc = TotElement.zero(cover, 0)
    acc2 = TotElement.zero(cover, 0)
    for a, b, c in _cyc(ys):
        acc = acc + tot_of(fa.component(2, at.bracket(2, a, b), c), 0)
        acc2 = acc2 + tot_of(At.bracket(2, fa.component(1, a), fa.component(2, b, c)), 0)
    out["atiyah: f2 of brackets"] = acc - bracket_A2
    out["atiyah: brackets with f2"] = acc2 - (bracket_A2 * 2 + lieA2)
    return out


def _diff(lhs: GradedElement, v: PolyMultivector, tot: TotElement, degree: int, cover) -> GradedElement:
    return lhs - GradedElement(degree, {"v": v, "tot": tot})


# ---------------------------------------------------------------------------
# slices
# ---------------------------------------------------------------------------


def equivalence_slices(
    P: PrePlecticPatch, cocycle: DeligneCocycle, which: str, field_degree: int = 1, weight: int | None = None
) -> dict:
    """Cone test of f^c_1 or f^a_1 between weight slices."""
    _check_omega(P, 2)
    patch, cover = P.patch, cocycle.cover
    cut = LEVELS[which]
    wA = max((f.weight() for f in cocycle.A.data.values()), default=0)
    W = weight if weight is not None else wA + field_degree
    big = W + field_degree + 2
    VF = GradedSpace.vector_fields(patch, field_degree)
    mor = diagram_morphisms(P, cocycle)
    if which == "courant":
        F, src_L, tgt_L = mor["fc"], mor["courant"], mor["cou"]
        src0 = GradedSlice(SumSpace([("v", VF), ("form", GradedSpace.forms(patch, 1, W))]), 0)
    else:
        F, src_L, tgt_L = mor["fa"], mor["atiyah"], mor["at"]
        src0 = GradedSlice(SumSpace([("v", VF)]), 0)
    src = {0: src0, 1: GradedSlice(SumSpace([("form", GradedSpace.forms(patch, 0, W))]), 1)}
    A = TotElement(cover, 2, {s: f for s, f in cocycle.A.data.items() if len(s) > 1})
    amb = GradedSlice(SumSpace([("v", VF), ("tot", TotSpace(cover, 1, W, cut))]), 0)
    cod = GradedSlice(SumSpace([("tot", TotSpace(cover, 2, big, cut))]), 0)

    def constraint(x):
        v = x.get("v")
        lhs = lie_tot(v, A).truncate(cut) if v is not None else TotElement.zero(cover, 2)
        return GradedElement(0, {"tot": lhs - d_tot(_t(x, cover, 1), cut)})

    tgt = {0: constrained_slice(amb, constraint, cod), 1: GradedSlice(SumSpace([("tot", TotSpace(cover, 0, W, cut))]), 1)}
    l1_src = src_L.brackets.get(1, lambda x: None)
    out = slice_chain_map(src, tgt, l1_src, tgt_L.brackets[1], lambda x: F.component(1, x), f"f{which[0]}")
    out.update(weight=W, field_degree=field_degree)
    return out


def kernel_residual(cocycle: DeligneCocycle, x: GradedElement, level: str) -> TotElement:
    """d_tot(t - iota_v(A^2 - A^1)) (courant) or d_tot(t + iota_v A^1) (atiyah).

    Both vanish for degree-zero elements of the matching truncated algebra.
    """
    cut = LEVELS[level]
    cover = cocycle.cover
    v, t = x.get("v"), _t(x, cover, 1)
    if v is None:
        return d_tot(t, cut)
    if level == "courant":
        return d_tot(t - iota_tot([v], _a2_minus_a1(cocycle)), cut)
    return d_tot(t + iota_tot([v], cocycle.part(1)), cut)
