"""Observables of a pre-n-plectic patch and the cocycle they come from.

Elements of the observables algebra are :class:`GradedElement` values:

* degree 0: parts ``"v"`` (vector field) and ``"form"`` ((n-1)-form H) with
  ``iota_v omega + dH = 0``;
* degree k >= 1: part ``"form"``, an (n-1-k)-form.

The brackets are ``l_1 = d``, ``l_2 = [v1, v2] + iota(v1^v2) omega`` on degree
zero, and ``l_k = bracket_sign(k) iota(v1^...^vk) omega`` for ``k >= 3``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence

from gmpy2 import mpq

from . import linalg
from .forms import DegreeError, Patch, PolyForm, PolyMultivector, contract, d, interior, poincare_homotopy, schouten
from .linfty import ChainComplexFD, ChainMapFD, GradedElement, LInftyMorphism, LInftyStructure, cone_identity
from .sampling import rand_combination, rand_form, rand_rational
from .truncation import GradedSpace, SubSpace, SumSpace, image_subspace, kernel_subspace, matrix_of

__all__ = [
    "bracket_sign",
    "kks_sign",
    "NotClosedError",
    "PrePlecticPatch",
    "obs_pair",
    "obs_form",
    "build_observables",
    "bh_complex",
    "hamiltonian_lie_algebra",
    "kks_cocycle",
    "kks_identity_residual",
    "solve_hamiltonian",
    "projection_to_fields",
    "kks_fiber_data",
    "FDLieAlgebra",
    "string_cocycle",
    "string_lie2",
    "restrict_cocycle",
]


def bracket_sign(k: int) -> int:
    """-(-1)^(k(k+1)/2): sign of the k-ary bracket; +1 for k = 1, 2."""
    return 1 if (k * (k + 1) // 2) % 2 else -1


def kks_sign(k: int) -> int:
    """-(-1)^(k(k-1)/2): sign of the k-th cocycle component."""
    return 1 if (k * (k - 1) // 2) % 2 else -1


class NotClosedError(ValueError):
    def __init__(self, msg: str = "omega not closed"):
        super().__init__(msg)


class PrePlecticPatch:
    """A coordinate patch with a closed (n+1)-form."""

    def __init__(self, patch: Patch, omega: PolyForm, name: str = ""):
        if omega.degree < 2:
            raise DegreeError("omega must have degree >= 2")
        if omega.patch != patch:
            raise ValueError("omega lives on another patch")
        if not d(omega).is_zero():
            raise NotClosedError()
        self.patch = patch
        self.omega = omega
        self.name = name or str(omega)
        self.n = omega.degree - 1
        self._ham_cache: dict[int, list[PolyMultivector]] = {}

    @classmethod
    def from_text(cls, coords: Sequence[str], omega: str, name: str = "") -> "PrePlecticPatch":
        patch = Patch(coords)
        return cls(patch, PolyForm.parse(omega, patch), name)

    def is_hamiltonian(self, v: PolyMultivector, H: PolyForm) -> bool:
        return (interior(v, self.omega) + d(H)).is_zero()

    def hamiltonian_form(self, v: PolyMultivector) -> PolyForm:
        """A primitive H with iota_v omega + dH = 0; raises if v is not Hamiltonian."""
        a = interior(v, self.omega)
        if not d(a).is_zero():
            raise ValueError("iota_v omega is not closed; v is not Hamiltonian")
        return -poincare_homotopy(a)

    def hamiltonian_fields(self, max_coeff_degree: int) -> list[PolyMultivector]:
        """Basis of vector fields with bounded coefficients and iota_v omega closed."""
        if max_coeff_degree not in self._ham_cache:
            V = GradedSpace.vector_fields(self.patch, max_coeff_degree)
            top = self.n + 1
            W = GradedSpace(self.patch, top, max(0, max_coeff_degree + self.omega.poly_degree()), PolyForm)
            if top > self.patch.dim:
                basis = V.basis()
            else:
                basis = kernel_subspace(lambda v: d(interior(v, self.omega)), V, W).basis()
            self._ham_cache[max_coeff_degree] = basis
        return self._ham_cache[max_coeff_degree]

    def sample_pair(self, rng: random.Random, max_deg: int) -> GradedElement:
        fields = self.hamiltonian_fields(max_deg)
        v = rand_combination(rng, fields, PolyMultivector.zero(self.patch, 1))
        H = self.hamiltonian_form(v)
        if self.n >= 2:
            H = H + d(rand_form(rng, self.patch, self.n - 2, max_deg, 2))
        elif rng.random() < 0.5:
            H = H + PolyForm.scalar(self.patch, rand_rational(rng))
        return obs_pair(v, H)

    def sample(self, rng: random.Random, degree: int, max_deg: int) -> GradedElement:
        if degree == 0:
            return self.sample_pair(rng, max_deg)
        return obs_form(degree, rand_form(rng, self.patch, self.n - 1 - degree, max_deg))


def obs_pair(v: PolyMultivector, H: PolyForm) -> GradedElement:
    return GradedElement(0, {"v": v, "form": H})


def obs_form(degree: int, eta: PolyForm) -> GradedElement:
    if degree < 1:
        raise DegreeError("forms of the observables algebra sit in degree >= 1")
    return GradedElement(degree, {"form": eta})


def field_of(x: GradedElement, patch: Patch) -> PolyMultivector:
    v = x.get("v")
    return v if v is not None else PolyMultivector.zero(patch, 1)


def form_of(x: GradedElement, patch: Patch, degree: int) -> PolyForm:
    f = x.get("form")
    return f if f is not None else PolyForm.zero(patch, degree)


def build_observables(P: PrePlecticPatch, max_deg: int = 2) -> LInftyStructure:
    n, patch, omega = P.n, P.patch, P.omega

    def l1(x):
        if x.degree == 0:
            return None
        dx = d(x.get("form"))
        if x.degree == 1:
            return GradedElement(0, {"form": dx})
        return obs_form(x.degree - 1, dx)

    def l2(x, y):
        if x.degree or y.degree:
            return None
        v1, v2 = x.get("v"), y.get("v")
        if v1 is None or v2 is None:
            return None
        return obs_pair(schouten(v1, v2), contract([v1, v2], omega))

    def lk(k):
        def bracket(*xs):
            if any(x.degree for x in xs):
                return None
            vs = [x.get("v") for x in xs]
            if any(v is None for v in vs):
                return None
            return obs_form(k - 2, contract(vs, omega) * bracket_sign(k))

        return bracket

    brackets = {1: l1, 2: l2}
    for k in range(3, n + 2):
        brackets[k] = lk(k)
    return LInftyStructure(
        name=f"observables[{P.name}]",
        max_degree=n - 1,
        brackets=brackets,
        sampler=lambda rng, deg: P.sample(rng, deg, max_deg),
        info={"n": n},
    )


def solve_hamiltonian(P: PrePlecticPatch, v: PolyMultivector) -> GradedElement:
    """The pair (v, H) with H = -h(iota_v omega); raises if iota_v omega is not closed."""
    return obs_pair(v, P.hamiltonian_form(v))


def is_observable(P: PrePlecticPatch, x: GradedElement) -> bool:
    if x.degree == 0:
        v = field_of(x, P.patch)
        H = form_of(x, P.patch, P.n - 1)
        return H.degree == P.n - 1 and P.is_hamiltonian(v, H)
    f = x.get("form")
    return f is None or f.degree == P.n - 1 - x.degree


# ---------------------------------------------------------------------------
# the complex of n-forms and the cocycle
# ---------------------------------------------------------------------------


def bh_complex(P: PrePlecticPatch, max_deg: int = 2) -> LInftyStructure:
    """Abelian complex: degree j holds (n-j)-forms, exact in degree zero; l_1 = d."""
    n, patch = P.n, P.patch

    def l1(x):
        if x.degree == 0:
            return None
        return GradedElement(x.degree - 1, {"form": d(x.get("form"))})

    def sampler(rng, deg):
        if deg == 0:
            return GradedElement(0, {"form": d(rand_form(rng, patch, n - 1, max_deg))})
        return GradedElement(deg, {"form": rand_form(rng, patch, n - deg, max_deg)})

    return LInftyStructure(f"bh[{P.name}]", max_degree=n, brackets={1: l1}, sampler=sampler)


def hamiltonian_lie_algebra(P: PrePlecticPatch, max_deg: int = 2) -> LInftyStructure:
    def l2(x, y):
        return GradedElement(0, {"v": schouten(x.get("v"), y.get("v"))})

    def sampler(rng, deg):
        v = rand_combination(rng, P.hamiltonian_fields(max_deg), PolyMultivector.zero(P.patch, 1))
        return GradedElement(0, {"v": v})

    return LInftyStructure(f"ham[{P.name}]", max_degree=0, brackets={2: l2}, sampler=sampler)


def kks_cocycle(P: PrePlecticPatch, source: LInftyStructure | None = None, target=None, max_deg: int = 2) -> LInftyMorphism:
    """Components kks_sign(k) iota(v_1^...^v_k) omega for k = 1..n+1."""
    source = source or hamiltonian_lie_algebra(P, max_deg)
    target = target or bh_complex(P, max_deg)

    def comp(k):
        def f(*xs):
            vs = [x.get("v") for x in xs]
            return GradedElement(k - 1, {"form": contract(vs, P.omega) * kks_sign(k)})

        return f

    return LInftyMorphism(f"kks[{P.name}]", source, target, {k: comp(k) for k in range(1, P.n + 2)})


def kks_identity_residual(P: PrePlecticPatch, vs: Sequence[PolyMultivector]) -> PolyForm:
    """d iota(v_1^...^v_k) omega - sum_{i<j} (-1)^(i+j+k) iota([v_i,v_j]^...) omega.

    Indices are 1-based; the hatted fields are dropped.  Vanishes for
    Hamiltonian v_i.
    """
    k = len(vs)
    out = d(contract(vs, P.omega))
    for i, j in itertools.combinations(range(k), 2):
        rest = [v for r, v in enumerate(vs) if r not in (i, j)]
        term = contract([schouten(vs[i], vs[j])] + rest, P.omega)
        out = out - term if (i + j + 2 + k) % 2 == 0 else out + term
    return out


def projection_to_fields(P: PrePlecticPatch, L: LInftyStructure, H: LInftyStructure) -> LInftyMorphism:
    """The strict morphism x = v + theta -> v."""

    def p1(x):
        if x.degree:
            return None
        v = x.get("v")
        return GradedElement(0, {"v": v}) if v is not None else None

    return LInftyMorphism("pi_fields", L, H, {1: p1})


# ---------------------------------------------------------------------------
# the homotopy fiber square
# ---------------------------------------------------------------------------


def cone_structure(P: PrePlecticPatch, max_deg: int = 2) -> LInftyStructure:
    """Cone of the identity of Omega^0 -> ... -> Omega^(n-1), as an abelian algebra.

    Degree k has ``"lower"`` an (n-1-k)-form and ``"upper"`` an (n-k)-form;
    ``d(a, b) = (d a + b, -d b)``.
    """
    n, patch = P.n, P.patch

    def l1(x):
        k = x.degree
        if k == 0:
            return None
        a, b = x.get("lower"), x.get("upper")
        parts = {}
        lower = None
        if a is not None and a.degree + 1 <= n - 1:
            lower = d(a)
        if b is not None:
            lower = b if lower is None else lower + b
            if k - 1 >= 1:
                parts["upper"] = -d(b)
        if lower is not None:
            parts["lower"] = lower
        return GradedElement(k - 1, parts)

    def sampler(rng, k):
        parts = {}
        if n - 1 - k >= 0:
            parts["lower"] = rand_form(rng, patch, n - 1 - k, max_deg)
        if k >= 1:
            parts["upper"] = rand_form(rng, patch, n - k, max_deg)
        return GradedElement(k, parts)

    return LInftyStructure(f"cone[{P.name}]", max_degree=n, brackets={1: l1}, sampler=sampler)


def cone_projection(P: PrePlecticPatch, K: LInftyStructure, BH: LInftyStructure) -> LInftyMorphism:
    """Strict map to the n-form complex: (-1)^(k-1) upper in degree k >= 1, d(lower) in degree 0."""

    def p1(x):
        if x.degree == 0:
            a = x.get("lower")
            return GradedElement(0, {"form": d(a)}) if a is not None else None
        b = x.get("upper")
        if b is None:
            return None
        return GradedElement(x.degree, {"form": b * (1 if x.degree % 2 else -1)})

    return LInftyMorphism("cone_projection", K, BH, {1: p1})


def fiber_lift(P: PrePlecticPatch, L: LInftyStructure, K: LInftyStructure) -> LInftyMorphism:
    """f_1(v + theta) = theta in the lower slot; f_k = bracket_sign(k) iota(v..) omega in the upper slot."""

    def f1(x):
        theta = x.get("form")
        return GradedElement(x.degree, {"lower": theta}) if theta is not None else None

    def fk(k):
        def f(*xs):
            if any(x.degree for x in xs):
                return None
            vs = [x.get("v") for x in xs]
            if any(v is None for v in vs):
                return None
            return GradedElement(k - 1, {"upper": contract(vs, P.omega) * bracket_sign(k)})

        return f

    comps = {1: f1}
    for k in range(2, P.n + 2):
        comps[k] = fk(k)
    return LInftyMorphism("fiber_lift", L, K, comps)


@dataclass
class FiberData:
    """Symbolic and truncated data of the homotopy fiber square."""

    observables: LInftyStructure
    fields: LInftyStructure
    bh: LInftyStructure
    cone: LInftyStructure
    kks: LInftyMorphism
    projection_fields: LInftyMorphism
    cone_projection: LInftyMorphism
    lift: LInftyMorphism
    truncated: dict = field(default_factory=dict)


def _form_slices(P: PrePlecticPatch, weight: int) -> dict[int, GradedSpace]:
    """Omega^j with weight <= bound, j = 0..n."""
    return {j: GradedSpace.forms(P.patch, j, weight) for j in range(0, P.n + 1)}


def kks_fiber_data(P: PrePlecticPatch, max_deg: int = 2, field_degree: int = 1, weight: int | None = None) -> FiberData:
    """Build the square and its truncation to finite dimensional complexes.

    Vector fields have coefficient degree <= ``field_degree``; forms have
    weight <= ``weight`` (default ``field_degree + n + omega's coefficient degree``).
    """
    n = P.n
    if weight is None:
        weight = field_degree + n + max(0, P.omega.poly_degree())
    L = build_observables(P, max_deg)
    Hm = hamiltonian_lie_algebra(P, max_deg)
    BH = bh_complex(P, max_deg)
    K = cone_structure(P, max_deg)
    data = FiberData(
        observables=L,
        fields=Hm,
        bh=BH,
        cone=K,
        kks=kks_cocycle(P, Hm, BH),
        projection_fields=projection_to_fields(P, L, Hm),
        cone_projection=cone_projection(P, K, BH),
        lift=fiber_lift(P, L, K),
    )
    data.truncated = _truncate_fiber(P, field_degree, weight)
    return data


def _truncate_fiber(P: PrePlecticPatch, field_degree: int, weight: int) -> dict:
    n, patch, omega = P.n, P.patch, P.omega
    forms = _form_slices(P, weight)
    # C_j = Omega^(n-1-j), j = 0..n-1
    C_dims = {j: forms[n - 1 - j].dim for j in range(n)}
    C_diff = {j: matrix_of(d, forms[n - 1 - j], forms[n - j]) for j in range(1, n)}
    C = ChainComplexFD(C_dims, C_diff, name="forms")
    K = cone_identity(C)
    # BH: degree 0 = d(Omega^(n-1)), degree j = Omega^(n-j)
    exact = image_subspace(d, forms[n - 1], forms[n])
    bh_spaces = {0: exact}
    for j in range(1, n + 1):
        bh_spaces[j] = forms[n - j]
    bh_diff = {}
    for j in range(1, n + 1):
        bh_diff[j] = matrix_of(d, bh_spaces[j], bh_spaces[j - 1])
    BH = ChainComplexFD({j: bh_spaces[j].dim for j in bh_spaces}, bh_diff, name="bh")
    # projection K -> BH
    proj = {}
    for k in range(0, n + 1):
        lower_dim = C.dim(k)
        upper_dim = C.dim(k - 1)
        if k == 0:
            proj[0] = matrix_of(d, forms[n - 1], exact)
        else:
            sign = 1 if k % 2 else -1
            entries = {(i, lower_dim + i): sign for i in range(upper_dim)}
            proj[k] = linalg.matrix(BH.dim(k), lower_dim + upper_dim, entries)
    p_A = ChainMapFD(K, BH, proj)
    # Hamiltonian fields and the cocycle's linear part
    V = GradedSpace.vector_fields(patch, field_degree)
    ham = SubSpace(V, linalg.from_columns(V.dim, [V.coords(v) for v in P.hamiltonian_fields(field_degree)]))
    X = ChainComplexFD({0: ham.dim}, {}, name="ham")
    f1 = ChainMapFD(X, BH, {0: matrix_of(lambda v: -interior(v, omega), ham, exact)})
    # the linear part of the observables algebra
    pairs_amb = SumSpace([("v", V), ("form", forms[n - 1])])
    pairs = kernel_subspace(lambda x: interior(x["v"], omega) + d(x["form"]), pairs_amb, forms[n])
    L_spaces = {0: pairs}
    for k in range(1, n):
        L_spaces[k] = forms[n - 1 - k]
    L_diff = {}
    if n >= 2:
        L_diff[1] = matrix_of(lambda eta: {"v": None, "form": d(eta)}, L_spaces[1], pairs)
        for k in range(2, n):
            L_diff[k] = matrix_of(d, L_spaces[k], L_spaces[k - 1])
    L_lin = ChainComplexFD({k: s.dim for k, s in L_spaces.items()}, L_diff, name="observables")
    # comparison map L -> X x_BH K, in ambient coordinates of X + K
    comparison = {}
    for k, sp in L_spaces.items():
        cols = []
        for b in sp.basis():
            if k == 0:
                vcoords = ham.coords(b["v"])
                lower = forms[n - 1].coords(b["form"])
                col = dict(vcoords)
                col.update({X.dim(0) + i: c for i, c in lower.items()})
            else:
                col = {X.dim(k) + i: c for i, c in sp.coords(b).items()}
            cols.append(col)
        comparison[k] = linalg.from_columns(X.dim(k) + K.dim(k), cols)
    return {
        "forms": C,
        "cone": K,
        "bh": BH,
        "projection": p_A,
        "fields": X,
        "kks_linear": f1,
        "observables": L_lin,
        "comparison": comparison,
        "weight": weight,
        "field_degree": field_degree,
    }


# ---------------------------------------------------------------------------
# finite dimensional Lie algebras
# ---------------------------------------------------------------------------


class FDLieAlgebra:
    """Lie algebra on basis e_0..e_(dim-1) with [e_i, e_j] = sum_k c[i,j][k] e_k."""

    def __init__(self, dim: int, constants: Mapping[tuple[int, int], Mapping[int, object]], name: str = ""):
        self.dim = dim
        self.name = name
        self.c: dict[tuple[int, int], dict[int, mpq]] = {}
        for (i, j), vec in constants.items():
            v = {k: mpq(x) for k, x in vec.items() if x}
            self.c[(i, j)] = v
            self.c[(j, i)] = {k: -x for k, x in v.items()}

    @classmethod
    def su2(cls) -> "FDLieAlgebra":
        return cls(3, {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {1: 1}}, name="su2")

    @classmethod
    def abelian(cls, dim: int) -> "FDLieAlgebra":
        return cls(dim, {}, name=f"R^{dim}")

    def bracket(self, x: Sequence, y: Sequence) -> list[mpq]:
        out = [mpq(0)] * self.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in self.c.get((i, j), {}).items():
                    out[k] += a * b * c
        return out

    def basis(self, i: int) -> list[mpq]:
        return [mpq(1) if k == i else mpq(0) for k in range(self.dim)]

    def ad(self, i: int) -> list[list[mpq]]:
        """Matrix of ad(e_i) with columns indexed by the input basis vector."""
        return [[self.c.get((i, j), {}).get(k, mpq(0)) for j in range(self.dim)] for k in range(self.dim)]

    def killing(self, i: int, j: int) -> mpq:
        A, B = self.ad(i), self.ad(j)
        return sum((A[r][s] * B[s][r] for r in range(self.dim) for s in range(self.dim)), mpq(0))

    def check_jacobi(self) -> bool:
        for i, j, k in itertools.product(range(self.dim), repeat=3):
            a = self.bracket(self.basis(i), self.bracket(self.basis(j), self.basis(k)))
            b = self.bracket(self.basis(j), self.bracket(self.basis(k), self.basis(i)))
            c = self.bracket(self.basis(k), self.bracket(self.basis(i), self.basis(j)))
            if any(p + q + r for p, q, r in zip(a, b, c)):
                return False
        return True

    def coboundary(self, cochain: Callable[..., mpq], p: int) -> Callable[..., mpq]:
        """Differential of a trivial-coefficient p-cochain on basis indices."""

        def dc(*idx: int) -> mpq:
            total = mpq(0)
            for a in range(p + 1):
                for b in range(a + 1, p + 1):
                    br = self.c.get((idx[a], idx[b]), {})
                    rest = [idx[t] for t in range(p + 1) if t not in (a, b)]
                    for k, coef in br.items():
                        total += (1 if (a + b) % 2 == 0 else -1) * coef * cochain(k, *rest)
            return total

        return dc

    def is_cocycle(self, cochain: Callable[..., mpq], p: int) -> bool:
        """Exhaustive check over all (p+1)-tuples of basis indices."""
        dc = self.coboundary(cochain, p)
        return all(dc(*idx) == 0 for idx in itertools.product(range(self.dim), repeat=p + 1))

    def central_extension(self, cocycle: Callable[[int, int], mpq]) -> "FDLieAlgebra":
        """g + R z with [e_i, e_j] = [e_i, e_j]_g + c(e_i, e_j) z."""
        consts = {}
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                v = dict(self.c.get((i, j), {}))
                c = cocycle(i, j)
                if c:
                    v[self.dim] = c
                consts[(i, j)] = v
        return FDLieAlgebra(self.dim + 1, consts, name=f"{self.name}+R")


def multilinear(fn: Callable[..., mpq], vectors: Sequence[Sequence]) -> mpq:
    total = mpq(0)
    for idx in itertools.product(*[range(len(v)) for v in vectors]):
        coef = mpq(1)
        for v, i in zip(vectors, idx):
            coef *= v[i]
            if not coef:
                break
        if coef:
            total += coef * fn(*idx)
    return total


def string_cocycle(g: FDLieAlgebra) -> Callable[[int, int, int], mpq]:
    """mu(x, y, z) = K(x, [y, z]) on basis indices."""

    def mu(i: int, j: int, k: int) -> mpq:
        br = g.c.get((j, k), {})
        return sum((c * g.killing(i, t) for t, c in br.items()), mpq(0))

    return mu


def _fd_element(degree: int, vec: Sequence) -> GradedElement:
    return GradedElement(degree, {i: mpq(c) for i, c in enumerate(vec) if c})


def _fd_vector(x: GradedElement, dim: int) -> list[mpq]:
    return [x.parts.get(i, mpq(0)) for i in range(dim)]


def string_lie2(g: FDLieAlgebra, cocycle: Callable[[int, int, int], mpq] | None = None) -> LInftyStructure:
    """The 2-term algebra g + R[1] attached to a 3-cocycle through the cone.

    The 3-cocycle lifts to the upper slot of the cone of the identity on R
    (sitting in degree 1) with the sign that makes the projection to R[2]
    return the cocycle; the ternary bracket is the lower slot of the cone
    differential applied to that lift.
    """
    mu = cocycle or string_cocycle(g)
    R1 = ChainComplexFD({1: 1}, {}, name="R[1]")
    K = cone_identity(R1)
    # projection K_2 -> R[2] is (-1)^(2-1) on the upper slot
    proj_sign = -1
    dK = K.d(2)  # K_2 (upper R) -> K_1 (lower R + upper 0)

    def l3_value(a: mpq) -> mpq:
        lift = linalg.from_columns(K.dim(2), [{0: a * proj_sign}])
        image = dK * lift
        return linalg.column(image, 0).get(0, mpq(0))

    def l2(x, y):
        if x.degree or y.degree:
            return None
        return _fd_element(0, g.bracket(_fd_vector(x, g.dim), _fd_vector(y, g.dim)))

    def l3(x, y, z):
        if x.degree or y.degree or z.degree:
            return None
        val = multilinear(mu, [_fd_vector(w, g.dim) for w in (x, y, z)])
        return _fd_element(1, [l3_value(val)])

    def sampler(rng, deg):
        if deg == 0:
            return _fd_element(0, [rand_rational(rng, allow_zero=True) for _ in range(g.dim)])
        return _fd_element(1, [rand_rational(rng)])

    return LInftyStructure(f"string[{g.name}]", max_degree=1, brackets={2: l2, 3: l3}, sampler=sampler)


def restrict_cocycle(
    P: PrePlecticPatch,
    g: FDLieAlgebra,
    rho: Sequence[PolyMultivector],
    evaluate_at_zero: bool = True,
):
    """Pull the cocycle back along a Lie algebra map g -> Hamiltonian fields.

    With ``evaluate_at_zero`` the top component is evaluated at the origin,
    giving a real (n+1)-cochain on g.
    """
    if len(rho) != g.dim:
        raise ValueError("need one vector field per basis element")
    for v in rho:
        if not d(interior(v, P.omega)).is_zero():
            raise ValueError("rho does not land in Hamiltonian vector fields")
    for i in range(g.dim):
        for j in range(g.dim):
            lhs = schouten(rho[i], rho[j])
            rhs = PolyMultivector.zero(P.patch, 1)
            for k, c in g.c.get((i, j), {}).items():
                rhs = rhs + rho[k] * c
            if not (lhs - rhs).is_zero():
                raise ValueError("rho is not a Lie algebra homomorphism")
    k = P.n + 1

    def component(*idx: int):
        form = contract([rho[i] for i in idx], P.omega) * kks_sign(len(idx))
        if evaluate_at_zero:
            return form.coefficient(()).at_origin() if form.degree == 0 else mpq(0)
        return form

    component.arity = k
    return component
