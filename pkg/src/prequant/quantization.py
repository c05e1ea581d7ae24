"""The dg Lie algebra of a Deligne cocycle and the morphism from observables.

Elements of the dg Lie algebra are :class:`GradedElement` values with parts
``"v"`` (vector field, degree 0 only) and ``"tot"`` (a total-complex cochain
of total degree ``n - 1 - degree``).  Degree zero elements satisfy
``L_v A = d_tot theta``.

The morphism from the observables has components

* ``f_1(v + theta) = v - res(theta) + iota_v A(1)``,
* ``f_m = bracket_sign(m) (res S_m + iota(v_1^...^v_m) A(m))`` for ``2 <= m <= n``,

where ``A(m) = sum_i (-1)^(m i) A^(n-i)`` and
``S_m = sum_i (-1)^i iota(v_1^..^v_i-hat^..^v_m) theta_i``.
"""

from __future__ import annotations

import itertools
import random
from math import comb
from typing import Sequence

from .algebra import chi, unshuffles
from .cech import (
    Cover,
    DeligneCocycle,
    TotElement,
    TotSpace,
    a_twist,
    d_tot,
    iota_tot,
    lie_tot,
    require_cocycle,
    res,
)
from .forms import PolyForm, PolyMultivector, contract, d, lie, schouten
from .linfty import CheckResult, GradedElement, LInftyMorphism, LInftyStructure
from .observables import PrePlecticPatch, bracket_sign, build_observables
from .sampling import rand_form
from .truncation import GradedSlice, GradedSpace, SumSpace, constrained_slice, slice_chain_map

__all__ = [
    "qu_elem",
    "dglie_qu",
    "quantomorphism_morphism",
    "s_map",
    "master_equation_blocks",
    "master_equation_residual",
    "verify_master_equation",
    "closed_form_I1",
    "closed_form_I2",
    "closed_form_I3",
    "closed_form_J1",
    "closed_form_J2",
    "closed_form_dtot",
    "lie_multivector_expansion_residual",
    "lie_sum_expansion_residual",
    "f1_truncated",
]


def _pm(e: int) -> int:
    return -1 if e % 2 else 1


def qu_elem(degree: int, v: PolyMultivector | None = None, tot: TotElement | None = None) -> GradedElement:
    parts = {}
    if v is not None and degree == 0:
        parts["v"] = v
    if tot is not None:
        parts["tot"] = tot
    return GradedElement(degree, parts)


def _tot_of(x: GradedElement, cover: Cover, n: int) -> TotElement:
    t = x.get("tot")
    return t if t is not None else TotElement.zero(cover, n - 1 - x.degree)


def _field(x: GradedElement, patch) -> PolyMultivector:
    v = x.get("v")
    return v if v is not None else PolyMultivector.zero(patch, 1)


def _form(x: GradedElement, patch, n: int) -> PolyForm:
    f = x.get("form")
    return f if f is not None else PolyForm.zero(patch, n - 1 - x.degree)


def _res(cover: Cover, form: PolyForm | None, degree: int) -> TotElement:
    if form is None or not form:
        return TotElement.zero(cover, degree)
    return res(cover, form)


def rand_tot(rng: random.Random, cover: Cover, degree: int, max_deg: int) -> TotElement:
    patch = cover.patch
    data = {}
    for i, simplices in cover.simplices.items():
        fd = degree - i
        if 0 <= fd <= patch.dim:
            for s in simplices:
                if rng.random() < 0.7:
                    data[s] = rand_form(rng, patch, fd, max_deg, 2)
    return TotElement(cover, degree, data)


def dglie_qu(
    P: PrePlecticPatch, cocycle: DeligneCocycle, max_deg: int = 1, morphism: LInftyMorphism | None = None
) -> LInftyStructure:
    """Brackets ``l_1 = d_tot`` and ``[v1 + t1, v2 + t2] = [v1, v2] + L_v1 t2 - L_v2 t1``."""
    require_cocycle(cocycle, P.omega)
    n, cover = P.n, cocycle.cover

    def l1(x):
        if x.degree == 0:
            return None
        return qu_elem(x.degree - 1, tot=d_tot(_tot_of(x, cover, n)))

    def l2(x, y):
        v1, v2 = x.get("v"), y.get("v")
        deg = x.degree + y.degree
        tot = TotElement.zero(cover, n - 1 - deg)
        if v1 is not None:
            tot = tot + lie_tot(v1, _tot_of(y, cover, n))
        if v2 is not None:
            tot = tot - lie_tot(v2, _tot_of(x, cover, n))
        v = schouten(v1, v2) if v1 is not None and v2 is not None else None
        return qu_elem(deg, v=v, tot=tot)

    L = LInftyStructure(
        name=f"dglie[{P.name}; {cover.name or len(cover)} opens]",
        max_degree=n - 1,
        brackets={1: l1, 2: l2},
        info={"n": n},
    )
    obs = build_observables(P, max_deg)

    def sampler(rng, deg):
        if deg == 0:
            f = morphism or quantomorphism_morphism(P, cocycle, obs, L)
            x = f.component(1, P.sample(rng, 0, max_deg))
            if n >= 2:
                x = x + l1(qu_elem(1, tot=rand_tot(rng, cover, n - 2, max_deg)))
            return x
        return qu_elem(deg, tot=rand_tot(rng, cover, n - 1 - deg, max_deg))

    L.sampler = sampler
    return L


def s_map(xs: Sequence[GradedElement], patch, n: int) -> PolyForm:
    """S_m(x_1..x_m) = sum_i (-1)^i iota(v's without v_i) theta_i, a form of degree n - m - sum deg."""
    m = len(xs)
    deg = n - m - sum(x.degree for x in xs)
    out = PolyForm.zero(patch, deg) if 0 <= deg <= patch.dim else None
    if out is None:
        return None
    vs = [x.get("v") for x in xs]
    for i, x in enumerate(xs):
        others = vs[:i] + vs[i + 1:]
        if any(v is None for v in others):
            continue
        th = x.get("form")
        if th is None:
            continue
        term = contract(others, th)
        out = out + (term if (i + 1) % 2 == 0 else -term)
    return out


def quantomorphism_morphism(
    P: PrePlecticPatch,
    cocycle: DeligneCocycle,
    source: LInftyStructure | None = None,
    target: LInftyStructure | None = None,
) -> LInftyMorphism:
    """The L-infinity morphism from the observables into the quantomorphism dg Lie algebra."""
    require_cocycle(cocycle, P.omega)
    n, cover = P.n, cocycle.cover
    source = source or build_observables(P)
    target = target or dglie_qu(P, cocycle)
    twisted = {m: a_twist(cocycle, m) for m in range(1, n + 1)}

    def f1(x):
        v = x.get("v")
        tdeg = n - 1 - x.degree
        tot = -_res(cover, x.get("form"), tdeg)
        if v is not None:
            tot = tot + iota_tot([v], twisted[1])
        return qu_elem(x.degree, v=v, tot=tot)

    def fm(m):
        sign = bracket_sign(m)

        def comp(*xs):
            deg = sum(x.degree for x in xs) + m - 1
            tdeg = n - 1 - deg
            if tdeg < 0:
                return None
            tot = _res(cover, s_map(xs, P.patch, n), tdeg)
            vs = [x.get("v") for x in xs]
            if all(v is not None for v in vs):
                tot = tot + iota_tot(vs, twisted[m])
            return qu_elem(deg, tot=tot * sign)

        return comp

    comps = {1: f1}
    for m in range(2, n + 1):
        comps[m] = fm(m)
    return LInftyMorphism(f"quantization[{P.name}]", source, target, comps)


# ---------------------------------------------------------------------------
# the master equation, block by block
# ---------------------------------------------------------------------------


def _source_block(F: LInftyMorphism, xs, ks) -> GradedElement:
    m = len(xs)
    degs = [x.degree for x in xs]
    total = GradedElement.zero(sum(degs) + m - 2)
    for k in ks:
        j = m + 1 - k
        for s in unshuffles(k, m):
            inner = F.source.bracket(k, *(xs[i] for i in s[:k]))
            if inner.is_zero():
                continue
            val = F.component(j, inner, *(xs[i] for i in s[k:]))
            total = total + val * (chi(s, degs) * _pm(k * (j - 1) + 1))
    return total


def master_equation_blocks(F: LInftyMorphism, xs: Sequence[GradedElement]) -> dict[str, GradedElement]:
    """``l'_1 f_m``, ``I1``, ``I2``, ``I3`` and ``J`` evaluated literally."""
    m = len(xs)
    degs = [x.degree for x in xs]
    out_deg = sum(degs) + m - 2
    tgt = F.target
    blocks = {
        "dtot": tgt.bracket(1, F.component(m, *xs)),
        "I1": _source_block(F, xs, [1]),
        "I2": _source_block(F, xs, [2]) if m >= 2 else GradedElement.zero(out_deg),
        "I3": _source_block(F, xs, range(3, m + 1)),
    }
    J = GradedElement.zero(out_deg)
    for s in range(1, m):
        t = m - s
        for tau in unshuffles(s, m):
            if tau[0] > tau[s]:
                continue
            a = F.component(s, *(xs[i] for i in tau[:s]))
            b = F.component(t, *(xs[i] for i in tau[s:]))
            if a.is_zero() or b.is_zero():
                continue
            e = (s - 1) + (t - 1) * sum(degs[i] for i in tau[:s])
            J = J + tgt.bracket(2, a, b) * (chi(tau, degs) * _pm(e))
    blocks["J"] = J
    return blocks


def master_equation_residual(F: LInftyMorphism, xs: Sequence[GradedElement]) -> GradedElement:
    blocks = master_equation_blocks(F, xs)
    total = GradedElement.zero(sum(x.degree for x in xs) + len(xs) - 2)
    for b in blocks.values():
        total = total + b
    return total


def verify_master_equation(F: LInftyMorphism, m: int, samples: Sequence[Sequence[GradedElement]]) -> CheckResult:
    """Sum the five blocks on each sample; failures record every block's value."""
    failures = []
    for idx, xs in enumerate(samples):
        if len(xs) != m:
            raise ValueError(f"sample {idx} has arity {len(xs)}, expected {m}")
        blocks = master_equation_blocks(F, xs)
        total = GradedElement.zero(sum(x.degree for x in xs) + m - 2)
        for b in blocks.values():
            total = total + b
        if not total.is_zero():
            failures.append({"sample": idx, "blocks": {k: repr(v) for k, v in sorted(blocks.items())}})
    return CheckResult(f"{F.name}: master equation m={m}", not failures, len(samples), failures)


# ---------------------------------------------------------------------------
# closed forms of the blocks
# ---------------------------------------------------------------------------


class _Ctx:
    def __init__(self, P: PrePlecticPatch, cocycle: DeligneCocycle, xs: Sequence[GradedElement]):
        self.P = P
        self.n = P.n
        self.patch = P.patch
        self.cover = cocycle.cover
        self.cocycle = cocycle
        self.xs = list(xs)
        self.m = len(xs)
        self.vs = [_field(x, self.patch) for x in xs]
        self.out_deg = sum(x.degree for x in xs) + self.m - 2
        self.tdeg = self.n - 1 - self.out_deg

    def theta(self, j: int) -> PolyForm:
        return _form(self.xs[j], self.patch, self.n)

    def zero(self) -> TotElement:
        return TotElement.zero(self.cover, self.tdeg)

    def res(self, form: PolyForm | None) -> TotElement:
        return _res(self.cover, form, self.tdeg)

    def iota(self, vs: Sequence[PolyMultivector], tot: TotElement) -> TotElement:
        """iota_tot, read as zero when a field slot belongs to a positive degree input."""
        if any(not v for v in vs) or not tot:
            return self.zero()
        out = iota_tot(vs, tot)
        return out if out else self.zero()

    def wrap(self, tot: TotElement, v: PolyMultivector | None = None) -> GradedElement:
        return qu_elem(self.out_deg, v=v, tot=tot)

    def without(self, *idx: int) -> list[PolyMultivector]:
        return [v for i, v in enumerate(self.vs) if i not in idx]

    def bracket_terms(self, j: int, i: int, k: int) -> PolyForm:
        """iota([v_i, v_k] ^ v's without i, j, k) theta_j."""
        return contract([schouten(self.vs[i], self.vs[k])] + self.without(i, j, k), self.theta(j))

    def triple_sum(self) -> TotElement:
        """(sum_{i<k<j} - sum_{i<j<k} + sum_{j<i<k}) (-1)^(i+j+k) iota(...) theta_j."""
        acc = self.zero()
        m = self.m
        for i, k in itertools.combinations(range(m), 2):
            for j in range(m):
                if j in (i, k):
                    continue
                if k < j:
                    sign = 1
                elif i < j:
                    sign = -1
                else:
                    sign = 1
                # 0-based indices shift each of i, j, k by one, three in total
                sign *= _pm(i + j + k + 3)
                acc = acc + self.res(self.bracket_terms(j, i, k)) * sign
        return acc


def closed_form_I1(P, cocycle, xs) -> GradedElement:
    c = _Ctx(P, cocycle, xs)
    m = c.m
    acc = c.zero()
    for i, x in enumerate(xs):
        if x.degree == 0:
            continue
        acc = acc + c.res(contract(c.without(i), d(c.theta(i)))) * _pm(i + 1)
    return c.wrap(acc * (bracket_sign(m) * _pm(m)))


def closed_form_I2(P, cocycle, xs) -> GradedElement:
    c = _Ctx(P, cocycle, xs)
    m = c.m
    omega = P.omega
    if m == 2:
        v1, v2 = c.vs
        br = schouten(v1, v2)
        tot = c.res(contract([v1, v2], omega)) - c.iota([br], a_twist(cocycle, 1))
        return c.wrap(tot, -br)
    s = _pm(comb(m, 2))
    first = c.res(contract(c.vs, omega)) * comb(m, 2)
    twisted = a_twist(cocycle, m - 1)
    for i, k in itertools.combinations(range(m), 2):
        first = first + c.iota([schouten(c.vs[i], c.vs[k])] + c.without(i, k), twisted) * _pm(i + k)
    return c.wrap(first * (-s) + c.triple_sum() * s)


def closed_form_I3(P, cocycle, xs) -> GradedElement:
    c = _Ctx(P, cocycle, xs)
    m = c.m
    coeff = _pm(comb(m + 1, 2) + m) * (comb(m, 2) - m + 1)
    return c.wrap(c.res(contract(c.vs, P.omega)) * coeff)


def closed_form_J1(F: LInftyMorphism, xs) -> GradedElement:
    """sum_i (-1)^(i-1) [f_1(x_i), f_(m-1)(rest)] for m >= 3; [f_1(x_1), f_1(x_2)] for m = 2.

    At m = 2 the sum would count its single term twice.
    """
    m = len(xs)
    if m == 2:
        return F.target.bracket(2, F.component(1, xs[0]), F.component(1, xs[1]))
    out = GradedElement.zero(sum(x.degree for x in xs) + m - 2)
    for i, x in enumerate(xs):
        rest = xs[:i] + xs[i + 1:]
        out = out + F.target.bracket(2, F.component(1, x), F.component(m - 1, *rest)) * _pm(i)
    return out


def closed_form_J2(P, cocycle, xs, lie_index: str = "i") -> GradedElement:
    """Closed form of J for m >= 3.

    ``lie_index="m"`` uses ``L_(v_m)`` in the last sum instead of ``L_(v_i)``;
    that variant is kept only to show it is not an identity, and is read on
    degree zero inputs only.
    """
    if lie_index != "i" and any(x.degree for x in xs):
        raise ValueError("the L_(v_m) reading is only defined on degree zero inputs")
    c = _Ctx(P, cocycle, xs)
    m = c.m
    twisted = a_twist(cocycle, m - 1)
    rhs = c.triple_sum() * 2
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            term = contract(c.without(i, j), lie(c.vs[i], c.theta(j)))
            rhs = rhs + c.res(term) * (_pm(i + j) * (1 if i < j else -1))
    for i, j in itertools.combinations(range(m), 2):
        rhs = rhs - c.iota([schouten(c.vs[i], c.vs[j])] + c.without(i, j), twisted) * (2 * _pm(i + j))
    for i in range(m):
        lv = c.vs[i] if lie_index == "i" else c.vs[m - 1]
        if not lv:
            continue
        rhs = rhs - c.iota(c.without(i), lie_tot(lv, twisted)) * _pm(i + 1)
    return c.wrap(rhs * (-_pm(comb(m, 2))))


def closed_form_dtot(P, cocycle, xs) -> GradedElement:
    c = _Ctx(P, cocycle, xs)
    m = c.m
    S = s_map(xs, P.patch, P.n)
    tot = c.res(d(S) if S is not None and S.degree < P.patch.dim else None)
    tot = tot + c.res(contract(c.vs, P.omega)) * _pm(m)
    if all(c.vs):
        tot = tot + lie_tot(_wedge_fields(c.vs), a_twist(cocycle, m - 1))
    return c.wrap(tot * bracket_sign(m))


def _wedge_fields(vs: Sequence[PolyMultivector]) -> PolyMultivector:
    from .forms import wedge_all

    return wedge_all(list(vs))


def lie_multivector_expansion_residual(vs: Sequence[PolyMultivector], a: PolyForm, lie_index: str = "i") -> PolyForm:
    """(-1)^m L(v_1^..^v_m) a - sum_{i<j} (-1)^(i+j) iota([v_i,v_j]^rest) a - sum_i (-1)^i iota(rest_i) L_(v_i) a."""
    m = len(vs)
    lhs = lie(_wedge_fields(vs), a) * _pm(m)
    for i, j in itertools.combinations(range(m), 2):
        rest = [v for k, v in enumerate(vs) if k not in (i, j)]
        lhs = lhs - contract([schouten(vs[i], vs[j])] + rest, a) * _pm(i + j)
    for i in range(m):
        rest = [v for k, v in enumerate(vs) if k != i]
        lv = vs[i] if lie_index == "i" else vs[m - 1]
        lhs = lhs - contract(rest, lie(lv, a)) * _pm(i + 1)
    return lhs


def lie_sum_expansion_residual(vs: Sequence[PolyMultivector], thetas: Sequence[PolyForm]) -> PolyForm:
    """Expansion of (-1)^(m-1) sum_j (-1)^j L(v's without j) theta_j into bracket and Lie terms."""
    m = len(vs)
    lhs = None
    for j in range(m):
        rest = [v for k, v in enumerate(vs) if k != j]
        term = lie(_wedge_fields(rest), thetas[j]) * _pm(m - 1 + j + 1)
        lhs = term if lhs is None else lhs + term
    for i, k in itertools.combinations(range(m), 2):
        for j in range(m):
            if j in (i, k):
                continue
            sign = 1 if k < j else (-1 if i < j else 1)
            rest = [v for q, v in enumerate(vs) if q not in (i, j, k)]
            lhs = lhs - contract([schouten(vs[i], vs[k])] + rest, thetas[j]) * (sign * _pm(i + j + k + 3))
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            rest = [v for q, v in enumerate(vs) if q not in (i, j)]
            lhs = lhs - contract(rest, lie(vs[i], thetas[j])) * (_pm(i + j) * (1 if i < j else -1))
    return lhs


# ---------------------------------------------------------------------------
# f_1 on finite slices
# ---------------------------------------------------------------------------


def _tot_weight(cocycle: DeligneCocycle) -> int:
    w = 0
    for f in cocycle.A.data.values():
        w = max(w, f.weight())
    return w


def f1_truncated(
    P: PrePlecticPatch, cocycle: DeligneCocycle, field_degree: int = 1, weight: int | None = None
) -> dict:
    """Matrices of f_1 between weight slices of both complexes, and its cone test."""
    n, patch, cover = P.n, P.patch, cocycle.cover
    wA = _tot_weight(cocycle)
    c_omega = max(P.omega.poly_degree(), 0)
    W = weight if weight is not None else max(n + field_degree + c_omega, wA + field_degree)
    big = max(W, wA + field_degree, n + 1 + field_degree + c_omega) + 1
    F = quantomorphism_morphism(P, cocycle)

    VF = GradedSpace.vector_fields(patch, field_degree)
    amb0 = GradedSlice(SumSpace([("v", VF), ("form", GradedSpace.forms(patch, n - 1, W))]), 0)
    cod0 = GradedSlice(SumSpace([("form", GradedSpace.forms(patch, n, big))]), 0)
    src = {0: constrained_slice(
        amb0,
        lambda x: GradedElement(0, {"form": contract([_field(x, patch)], P.omega) + d(_form(x, patch, n))}),
        cod0,
    )}
    for k in range(1, n):
        src[k] = GradedSlice(SumSpace([("form", GradedSpace.forms(patch, n - 1 - k, W))]), k)

    amb0p = GradedSlice(SumSpace([("v", VF), ("tot", TotSpace(cover, n - 1, W))]), 0)
    cod0p = GradedSlice(SumSpace([("tot", TotSpace(cover, n, big))]), 0)

    def constraint(x):
        return GradedElement(0, {"tot": lie_tot(_field(x, patch), cocycle.A) - d_tot(_tot_of(x, cover, n))})

    tgt = {0: constrained_slice(amb0p, constraint, cod0p)}
    for k in range(1, n):
        tgt[k] = GradedSlice(SumSpace([("tot", TotSpace(cover, n - 1 - k, W))]), k)

    out = slice_chain_map(
        src,
        tgt,
        build_observables(P).brackets[1],
        dglie_qu(P, cocycle).brackets[1],
        lambda x: F.component(1, x),
        "f1",
    )
    out.update(weight=W, field_degree=field_degree)
    return out
