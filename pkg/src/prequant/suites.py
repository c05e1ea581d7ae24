"""Named verification suites producing check records.

Every check draws from its own generator seeded by ``(seed, check name)``,
so records do not depend on which other checks ran.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import cech, courant, forms, linfty, observables, quantization
from .cech import Collation, check_deligne, d_tot, iota_tot, res
from .datasets import CocycleData, Zoo
from .forms import PolyForm, PolyMultivector, contract, d, interior, lie, schouten, wedge
from .linfty import CheckResult, GradedElement, check_equal_morphisms, check_generalized_jacobi, check_morphism
from .sampling import rand_combination, rand_form, rand_multivector, rand_vector_field

__all__ = ["SuiteConfig", "Record", "SUITES", "run_suite"]


@dataclass
class SuiteConfig:
    seed: int = 0
    samples: int = 100
    poly_degree: int = 2
    truncation: int = 3

    def validate(self) -> None:
        if self.seed < 0 or self.seed >= 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.samples < 1:
            raise ValueError("sample count must be positive")
        if self.poly_degree < 0 or self.truncation < 0:
            raise ValueError("degree bounds must be non-negative")


@dataclass
class Record:
    name: str
    anchor: str
    samples: int
    passed: bool
    witness: object = None
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        out = {"name": self.name, "anchor": self.anchor, "samples": self.samples, "passed": self.passed}
        out["witness"] = self.witness if not self.passed else None
        if self.details:
            out["details"] = self.details
        return out


def _rng(cfg: SuiteConfig, name: str) -> random.Random:
    return random.Random(f"{cfg.seed}/{name}")


def _from_check(name: str, anchor: str, res_: CheckResult) -> Record:
    witness = res_.failures[0] if res_.failures else None
    if not res_.passed and witness is None:
        witness = {"note": res_.note or "failed"}
    return Record(name, anchor, res_.samples, res_.passed, witness)


def _sampled(name: str, anchor: str, count: int, draw: Callable[[], tuple], residual: Callable[..., object]) -> Record:
    """Evaluate ``residual(*draw())`` ``count`` times; pass iff every value is zero."""
    for i in range(count):
        args = draw()
        r = residual(*args)
        if r is not None and not _is_zero(r):
            return Record(name, anchor, i + 1, False, {"sample": i, "inputs": [repr(a) for a in args], "residual": repr(r)})
    return Record(name, anchor, count, True)


def _is_zero(r) -> bool:
    if isinstance(r, dict):
        return all(_is_zero(v) for v in r.values())
    if isinstance(r, bool):
        return r
    return r.is_zero()


def _flag(name: str, anchor: str, ok: bool, details: dict | None = None, samples: int = 0) -> Record:
    details = details or {}
    return Record(name, anchor, samples, bool(ok), None if ok else {"details": _plain(details)}, _plain(details))


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    return str(obj)


# ---------------------------------------------------------------------------
# cartan
# ---------------------------------------------------------------------------


def suite_cartan(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    pd = max(cfg.poly_degree, 1)
    for pname, P in sorted(zoo.patches.items()):
        patch = P.patch
        N = patch.dim
        if N < 3:
            continue
        tag = f"[{pname}]"

        name = f"cartan: d squared {tag}"
        rng = _rng(cfg, name)
        out.append(_sampled(name, "d d = 0 on polynomial forms", cfg.samples,
                            lambda: (rand_form(rng, patch, rng.randrange(N + 1), pd),), lambda a: d(d(a))))

        name = f"cartan: graded commutativity {tag}"
        rng = _rng(cfg, name)

        def draw_pair():
            p = rng.randrange(N + 1)
            q = rng.randrange(N + 1 - p)
            return rand_form(rng, patch, p, pd), rand_form(rng, patch, q, pd)

        out.append(_sampled(name, "a ^ b = (-1)^(|a||b|) b ^ a", cfg.samples, draw_pair,
                            lambda a, b: wedge(a, b) - wedge(b, a) * (-1 if (a.degree * b.degree) % 2 else 1)))

        name = f"cartan: leibniz rule {tag}"
        rng = _rng(cfg, name)

        def leibniz(a, b):
            sign = -1 if a.degree % 2 else 1
            lhs = d(wedge(a, b))
            return lhs - (wedge(d(a), b) + wedge(a, d(b)) * sign) if lhs is not None else None

        out.append(_sampled(name, "d(a ^ b) = da ^ b + (-1)^|a| a ^ db", cfg.samples, draw_pair, leibniz))

        name = f"cartan: commutator of contraction and lie derivative {tag}"
        rng = _rng(cfg, name)

        def draw_cartan():
            p = rng.randint(1, 2)
            q = rng.randint(1, 2)
            deg = rng.randint(min(p + q, N), N)
            return rand_multivector(rng, patch, p, pd), rand_multivector(rng, patch, q, pd), rand_form(rng, patch, deg, pd)

        out.append(_sampled(name, "iota([u,v]) = [L_u, iota_v] for multivector fields", cfg.samples, draw_cartan,
                            forms.cartan_commutator_residual))

        for k in range(1, 5):
            if k - 1 > N:
                continue
            name = f"cartan: contraction formula k={k} {tag}"
            rng = _rng(cfg, name)

            def draw_ext(k=k, rng=rng):
                deg = rng.randint(max(k - 1, 0), N)
                return [rand_vector_field(rng, patch, pd) for _ in range(k)], rand_form(rng, patch, deg, pd)

            out.append(_sampled(name, "d iota(v_1^...^v_k) expanded through brackets and lie derivatives",
                                cfg.samples, draw_ext, forms.extended_cartan_residual))

        name = f"cartan: homotopy operator {tag}"
        rng = _rng(cfg, name)
        out.append(_sampled(name, "d h + h d = id - evaluation at the origin", cfg.samples,
                            lambda: (rand_form(rng, patch, rng.randrange(N + 1), pd),), forms.homotopy_residual))
    return out


# ---------------------------------------------------------------------------
# observables and kks
# ---------------------------------------------------------------------------


def suite_observables(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    pd = cfg.poly_degree
    for pname, P in sorted(zoo.patches.items()):
        tag = f"[{pname}]"
        L = observables.build_observables(P, pd)
        for m in range(1, P.n + 3):
            name = f"observables: jacobi m={m} {tag}"
            S = linfty.sample_tuples(L, m, cfg.samples, _rng(cfg, name))
            out.append(_from_check(name, "higher Jacobi identity of the observables", check_generalized_jacobi(L, m, S)))
        m = P.n + 3
        out.append(_flag(f"observables: jacobi m={m} vanishes by degree {tag}", "concentration in degrees 0..n-1",
                         linfty.vanishes_by_degree(L, m)))

        name = f"observables: hamiltonian closure {tag}"
        rng = _rng(cfg, name)
        zero = PolyMultivector.zero(P.patch, 1)
        fields = P.hamiltonian_fields(pd)

        def draw_two():
            return rand_combination(rng, fields, zero), rand_combination(rng, fields, zero)

        out.append(_sampled(name, "[v1, v2] is Hamiltonian with form iota(v1^v2) omega", cfg.samples, draw_two,
                            lambda u, v: interior(schouten(u, v), P.omega) + d(contract([u, v], P.omega))))

        name = f"observables: hamiltonian fields preserve omega {tag}"
        rng = _rng(cfg, name)
        out.append(_sampled(name, "L_v omega = 0 for Hamiltonian v", cfg.samples,
                            lambda: (rand_combination(rng, fields, zero),), lambda v: lie(v, P.omega)))

        name = f"observables: higher brackets vanish off degree zero {tag}"
        rng = _rng(cfg, name)

        def draw_mixed():
            k = rng.randint(3, P.n + 2)
            xs = [P.sample(rng, 0, pd) for _ in range(k)]
            if P.n >= 2:
                xs[rng.randrange(k)] = P.sample(rng, rng.randint(1, P.n - 1), pd)
            return (xs,)

        def mixed(xs):
            if all(x.degree == 0 for x in xs):
                return None
            return L.bracket(len(xs), *xs)

        out.append(_sampled(name, "l_k for k >= 3 vanishes on inputs of positive degree", cfg.samples, draw_mixed, mixed))
    return out


def _fiber_records(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    for pname, P in sorted(zoo.patches.items()):
        tag = f"[{pname}]"
        D = observables.kks_fiber_data(P, cfg.poly_degree, field_degree=1)
        L = D.observables
        top = P.n + 2
        name = f"fiber: square commutes {tag}"
        rng = _rng(cfg, name)
        S = {m: linfty.sample_tuples(L, m, cfg.samples, rng) for m in range(1, top + 1)}
        left = linfty.compose(D.cone_projection, D.lift)
        right = linfty.compose(D.kks, D.projection_fields)
        sq = check_equal_morphisms(left, right, range(1, top + 1), S, name)
        out.append(_from_check(name, "projection of the lift equals the cocycle on projected fields", sq))
        name = f"fiber: lift is a morphism {tag}"
        rng = _rng(cfg, name)
        ok = all(check_morphism(D.lift, m, linfty.sample_tuples(L, m, cfg.samples, rng)).passed for m in range(1, top + 1))
        out.append(_flag(name, "lift into the cone of the identity", ok, samples=cfg.samples * top))
        T = D.truncated
        h = linfty.check_fiber_hypotheses(T["projection"], T["cone"], sq, T["kks_linear"], T["observables"], T["comparison"])
        anchor = "homotopy fiber hypotheses on weight truncations"
        out.append(_flag(f"fiber: projection is a fibration {tag}", anchor, h.fibration, {"dims": T["cone"].dims}))
        out.append(_flag(f"fiber: cone is acyclic {tag}", anchor, h.acyclic))
        out.append(_flag(f"fiber: square hypothesis {tag}", anchor, h.square_commutes))
        out.append(_flag(f"fiber: observables are the pullback {tag}", anchor, h.pullback, h.details))
    return out


def suite_kks(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    pd = cfg.poly_degree
    for pname, P in sorted(zoo.patches.items()):
        tag = f"[{pname}]"
        F = observables.kks_cocycle(P, max_deg=pd)
        for m in range(1, P.n + 2):
            name = f"kks: morphism m={m} {tag}"
            S = linfty.sample_tuples(F.source, m, cfg.samples, _rng(cfg, name))
            out.append(_from_check(name, "cocycle components kks_sign(k) iota(v_1^...^v_k) omega", check_morphism(F, m, S)))
        fields = P.hamiltonian_fields(pd)
        zero = PolyMultivector.zero(P.patch, 1)
        for k in range(1, P.n + 2):
            name = f"kks: contraction identity k={k} {tag}"
            rng = _rng(cfg, name)
            out.append(_sampled(name, "d iota(v_1^...^v_k) omega through brackets of Hamiltonian fields", cfg.samples,
                                lambda k=k, rng=rng: ([rand_combination(rng, fields, zero) for _ in range(k)],),
                                lambda vs: observables.kks_identity_residual(P, vs)))
    out.extend(_fiber_records(zoo, cfg))
    return out


def suite_fiber(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    return _fiber_records(zoo, cfg)


# ---------------------------------------------------------------------------
# master equation
# ---------------------------------------------------------------------------


def _deligne_record(c: CocycleData) -> Record:
    rep = check_deligne(c.cocycle, c.patch.omega)
    return _flag(f"deligne: cocycle [{c.name}]", "cocycle relations and d_tot A = res(omega)", rep["passed"],
                 {"violations": rep["violations"]})


def _valid_cocycles(zoo: Zoo, out: list[Record]) -> list[tuple[str, CocycleData]]:
    """Append a validity record per cocycle and return the valid ones, by name."""
    good = []
    for cname, c in sorted(zoo.cocycles.items()):
        rec = _deligne_record(c)
        out.append(rec)
        if rec.passed:
            good.append((cname, c))
    return good


def suite_master_equation(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    pd = min(cfg.poly_degree, 1)
    for cname, c in _valid_cocycles(zoo, out):
        tag = f"[{cname}]"
        P, C, n = c.patch, c.cocycle, c.patch.n
        obs = observables.build_observables(P, pd)
        qu = quantization.dglie_qu(P, C, pd)
        F = quantization.quantomorphism_morphism(P, C, obs, qu)
        for m in range(1, n + 2):
            name = f"master: equation m={m} {tag}"
            S = linfty.sample_tuples(obs, m, cfg.samples, _rng(cfg, name))
            out.append(_from_check(name, "l'_1 f_m + I1 + I2 + I3 + J = 0", quantization.verify_master_equation(F, m, S)))
            if m == 1:
                continue
            closed_forms = [
                ("I1", "I1", lambda xs: quantization.closed_form_I1(P, C, xs)),
                ("I2", "I2", lambda xs: quantization.closed_form_I2(P, C, xs)),
                ("J", "J (bracket form)", lambda xs: quantization.closed_form_J1(F, xs)),
                ("dtot", "l'_1 f_m", lambda xs: quantization.closed_form_dtot(P, C, xs)),
            ]
            if m >= 3:
                closed_forms += [
                    ("I3", "I3", lambda xs: quantization.closed_form_I3(P, C, xs)),
                    ("J", "J (lie form)", lambda xs: quantization.closed_form_J2(P, C, xs)),
                ]
            for block, label, closed in closed_forms:
                name = f"master: closed form of {label} m={m} {tag}"
                S = linfty.sample_tuples(obs, m, cfg.samples, _rng(cfg, name))
                failures = []
                for i, xs in enumerate(S):
                    diff = quantization.master_equation_blocks(F, xs)[block] - closed(xs)
                    if not diff.is_zero():
                        failures.append({"sample": i, "residual": repr(diff)})
                        break
                out.append(_from_check(name, f"closed form of the {label} block", CheckResult(name, not failures, len(S), failures)))

        name = f"master: quantomorphisms cover hamiltonian fields {tag}"
        rng = _rng(cfg, name)

        def ham_residual(x):
            a = interior(x.get("v") or PolyMultivector.zero(P.patch, 1), P.omega)
            return d(forms.poincare_homotopy(a)) - a

        out.append(_sampled(name, "iota_v omega is exact for degree-zero quantomorphisms", cfg.samples,
                            lambda: (qu.sample(rng, 0),), ham_residual))
    for pname, P in sorted(zoo.patches.items()):
        name = f"master: lie derivative of a wedge [{pname}]"
        rng = _rng(cfg, name)
        N = P.patch.dim

        def draw_lie(rng=rng, patch=P.patch, N=N):
            k = rng.randint(1, min(3, N))
            deg = rng.randint(k, N)
            return [rand_vector_field(rng, patch, 1) for _ in range(k)], rand_form(rng, patch, deg, 1)

        out.append(_sampled(name, "L_(v_1^...^v_k) expanded over the factors", cfg.samples, draw_lie,
                            quantization.lie_multivector_expansion_residual))
    return out


# ---------------------------------------------------------------------------
# courant and atiyah
# ---------------------------------------------------------------------------


def _jacobi_records(L, ms: Iterable[int], cfg: SuiteConfig, label: str, anchor: str) -> list[Record]:
    out = []
    for m in ms:
        name = f"{label} jacobi m={m}"
        S = linfty.sample_tuples(L, m, cfg.samples, _rng(cfg, name))
        out.append(_from_check(name, anchor, check_generalized_jacobi(L, m, S)))
    return out


def _morphism_records(F, ms: Iterable[int], cfg: SuiteConfig, label: str, anchor: str) -> list[Record]:
    out = []
    for m in ms:
        name = f"{label} morphism m={m}"
        S = linfty.sample_tuples(F.source, m, cfg.samples, _rng(cfg, name))
        out.append(_from_check(name, anchor, check_morphism(F, m, S)))
    return out


def _equal_records(F, G, cfg: SuiteConfig, name: str, anchor: str, source=None) -> Record:
    src = source or F.source
    rng = _rng(cfg, name)
    S = {k: linfty.sample_tuples(src, k, cfg.samples, rng) for k in (1, 2)}
    return _from_check(name, anchor, check_equal_morphisms(F, G, (1, 2), S, name))


def suite_courant_atiyah(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    pd = min(cfg.poly_degree, 1)
    done_patches: set[str] = set()
    for cname, c in _valid_cocycles(zoo, out):
        P, C = c.patch, c.cocycle
        tag = f"[{cname}]"
        ptag = f"[{P.name}]"
        if P.n == 1:
            at = courant.atiyah1(P, pd)
            if P.name not in done_patches:
                out += _jacobi_records(at, (1, 2, 3), cfg, f"atiyah1: {ptag}", "Atiyah Lie algebra of a closed 2-form")
            L = courant.lie_algebra_at(P, C, pd)
            out += _jacobi_records(L, (2, 3), cfg, f"atiyah1: cech model {tag}", "Lie algebra of pairs with L_v A^0 = delta t")
            psi = courant.atiyah_iso(P, C, at, L)
            out += _morphism_records(psi, (1, 2, 3), cfg, f"atiyah1: isomorphism {tag}", "v + c -> v - res(c) + iota_v A^1")
            for fd in (1, 2):
                r = courant.atiyah_iso_slices(P, C, fd)
                out.append(_flag(f"atiyah1: isomorphism bijective on slices fd={fd} {tag}", "rank of the isomorphism on slices",
                                 r["bijective"], r))
            obs = observables.build_observables(P, pd)
            qu = quantization.dglie_qu(P, C, pd)
            f = quantization.quantomorphism_morphism(P, C, obs, qu)
            upper = linfty.compose_low(psi, courant.observables_into_atiyah1(P, obs, at))
            lower = linfty.compose_low(courant.quantization_into_at(P, C, qu, L), f)
            out.append(_equal_records(upper, lower, cfg, f"atiyah1: square commutes {tag}",
                                      "isomorphism after inclusion equals inclusion after f", obs))
        elif P.n == 2:
            D = courant.diagram_morphisms(P, C, pd)
            if P.name not in done_patches:
                out += _jacobi_records(D["courant"], (1, 2, 3, 4), cfg, f"courant2: {ptag}", "Courant Lie 2-algebra of a closed 3-form")
                out += _jacobi_records(D["atiyah"], (1, 2, 3, 4), cfg, f"atiyah2: {ptag}", "Atiyah Lie 2-algebra of a closed 3-form")
                out += _morphism_records(D["phi"], (1, 2, 3, 4), cfg, f"phi: {ptag}", "observables into the Courant algebra")
                out += _morphism_records(D["psi"], (1, 2, 3, 4), cfg, f"psi: {ptag}", "Courant algebra onto the Atiyah algebra")
                name = f"psi: proof identities {ptag}"
                rng = _rng(cfg, name)
                cou = D["courant"]
                out.append(_sampled(name, "identities behind the morphism property of psi", cfg.samples,
                                    lambda: ([cou.sample(rng, 0) for _ in range(3)], cou.sample(rng, 1)),
                                    lambda xs, eta: courant.psi_identities(P, xs, eta)))
            out += _jacobi_records(D["cou"], (1, 2, 3), cfg, f"courant2: cech model {tag}", "truncated quantomorphisms, forms of degree <= 1")
            out += _jacobi_records(D["at"], (1, 2, 3), cfg, f"atiyah2: cech model {tag}", "truncated quantomorphisms, functions only")
            out += _morphism_records(D["fc"], (1, 2, 3, 4), cfg, f"fc: {tag}", "Courant algebra into its Cech model")
            out += _morphism_records(D["fa"], (1, 2, 3, 4), cfg, f"fa: {tag}", "Atiyah algebra into its Cech model")
            out.append(_equal_records(D["fc.phi"], D["i.f"], cfg, f"diagram: fc phi = i f {tag}", "left square of the ladder"))
            out.append(_equal_records(D["fa.psi"], D["p.fc"], cfg, f"diagram: fa psi = p fc {tag}", "right square of the ladder"))
            out.append(_equal_records(D["fa.psi.phi"], D["p.i.f"], cfg, f"diagram: outer rectangle {tag}", "outer rectangle of the ladder"))
            name = f"fc fa: proof identities {tag}"
            rng = _rng(cfg, name)
            cou = D["courant"]
            out.append(_sampled(name, "bracket identities behind fc and fa", cfg.samples,
                                lambda: ([cou.sample(rng, 0) for _ in range(3)],),
                                lambda xs: courant.fc_fa_identities(P, C, xs)))
            for level, key in (("courant", "cou"), ("atiyah", "at")):
                name = f"{level}: kernel identity {tag}"
                rng = _rng(cfg, name)
                out.append(_sampled(name, "degree-zero elements of the truncated model", cfg.samples,
                                    lambda key=key, rng=rng: (D[key].sample(rng, 0),),
                                    lambda x, level=level: courant.kernel_residual(C, x, level)))
        done_patches.add(P.name)
    return out


# ---------------------------------------------------------------------------
# collation and cohomology
# ---------------------------------------------------------------------------


def _weights_for(zoo: Zoo, cover) -> list | None:
    for cd in zoo.covers.values():
        if cd.cover is cover:
            return cd.weights
    return None


def suite_collation(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    pd = cfg.poly_degree
    for cname, cd in sorted(zoo.covers.items()):
        tag = f"[{cname}]"
        cov = cd.cover
        col = Collation(cov, cd.weights)
        patch = cov.patch
        N = patch.dim
        top = N + cov.max_cech_degree

        name = f"collation: j after res is the identity {tag}"
        rng = _rng(cfg, name)
        out.append(_sampled(name, "j res = id", cfg.samples, lambda: (rand_form(rng, patch, rng.randrange(N + 1), pd),),
                            lambda a: col.j(res(cov, a)) - a))

        name = f"collation: chain homotopy {tag}"
        rng = _rng(cfg, name)
        out.append(_sampled(name, "id - res j = d_tot H + H d_tot", cfg.samples,
                            lambda: (quantization.rand_tot(rng, cov, rng.randrange(top + 1), pd),), col.homotopy_residual))

        name = f"collation: j is a chain map {tag}"
        rng = _rng(cfg, name)

        def chain(x):
            jx = col.j(x)
            if jx is None:
                return None
            djx = d(jx)
            jdx = col.j(d_tot(x))
            return djx - jdx if djx is not None and jdx is not None else None

        out.append(_sampled(name, "d j = j d_tot", cfg.samples,
                            lambda: (quantization.rand_tot(rng, cov, rng.randrange(N), pd),), chain))

    for cname, c in _valid_cocycles(zoo, out):
        weights = _weights_for(zoo, c.cocycle.cover)
        if weights is None:
            continue
        P, C = c.patch, c.cocycle
        col = Collation(C.cover, weights)
        qu = quantization.dglie_qu(P, C, min(pd, 1))
        twist = cech.a_twist(C, 1)
        name = f"collation: degree-zero step [{cname}]"
        rng = _rng(cfg, name)

        def step(x, C=C, P=P, col=col, twist=twist):
            v = x.get("v") or PolyMultivector.zero(P.patch, 1)
            theta = quantization._tot_of(x, C.cover, P.n) - iota_tot([v], twist)
            dt = d_tot(theta)
            return {"curvature": dt - res(C.cover, interior(v, P.omega)), "H": col.H(dt)}

        out.append(_sampled(name, "H(d_tot eta) = 0 for eta = theta - iota_v A(1)", cfg.samples,
                            lambda qu=qu, rng=rng: (qu.sample(rng, 0),), step))
    return out


def suite_cohomology(zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    out = []
    for cname, cd in sorted(zoo.covers.items()):
        for D in range(cfg.truncation + 1):
            tot = cech.truncated_tot_cohomology(cd.cover, D)
            dr = cech.truncated_de_rham_cohomology(cd.cover.patch, D)
            degrees = set(tot) | set(dr)
            ok = all(tot.get(k, 0) == dr.get(k, 0) for k in degrees)
            out.append(_flag(f"cohomology: tot matches de rham D={D} [{cname}]", "restriction is a quasi-isomorphism",
                             ok, {"tot": tot, "de_rham": dr}))
    for cname, c in _valid_cocycles(zoo, out):
        P, C = c.patch, c.cocycle
        tag = f"[{cname}]"
        r = quantization.f1_truncated(P, C, 1)
        details = {"source": r["source_dims"], "target": r["target_dims"], "weight": r["weight"]}
        out.append(_flag(f"cohomology: f1 chain map {tag}", "f_1 on weight slices", r["chain_map"], details))
        out.append(_flag(f"cohomology: f1 quasi-isomorphism {tag}", "acyclic cone of f_1 on weight slices",
                         r["quasi_isomorphism"], details))
        if P.n == 2:
            for which in ("courant", "atiyah"):
                r = courant.equivalence_slices(P, C, which)
                details = {"source": r["source_dims"], "target": r["target_dims"], "weight": r["weight"]}
                label = "fc" if which == "courant" else "fa"
                out.append(_flag(f"cohomology: {label} chain map {tag}", f"{label}_1 on weight slices", r["chain_map"], details))
                out.append(_flag(f"cohomology: {label} quasi-isomorphism {tag}", f"acyclic cone of {label}_1 on weight slices",
                                 r["quasi_isomorphism"], details))
    return out


SUITES: dict[str, Callable[[Zoo, SuiteConfig], list[Record]]] = {
    "cartan": suite_cartan,
    "observables": suite_observables,
    "kks": suite_kks,
    "master-equation": suite_master_equation,
    "courant-atiyah": suite_courant_atiyah,
    "fiber": suite_fiber,
    "collation": suite_collation,
    "cohomology": suite_cohomology,
}


def run_suite(name: str, zoo: Zoo, cfg: SuiteConfig) -> list[Record]:
    """Records of one suite, or of every suite for ``"all"``, sorted by name."""
    cfg.validate()
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(list(SUITES) + ['all'])}")
    records: dict[str, Record] = {}
    for n in names:
        for r in SUITES[n](zoo, cfg):
            records.setdefault(r.name, r)
    return [records[k] for k in sorted(records)]
