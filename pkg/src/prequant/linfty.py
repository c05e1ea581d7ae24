"""L-infinity algebras, their morphisms, and finite dimensional chain complexes.

Grading is homological: ``l_k`` has degree ``k - 2`` and ``l_1`` lowers degree.
The higher Jacobi identity checked here is

    sum_{k+l=m+1} sum_{s in Sh(k,m-k)} chi(s) (-1)^(k(l-1)) l_l(l_k(x_s1..x_sk), x_s(k+1)..x_sm) = 0.

For morphisms the identity is written with the source terms carrying
``(-1)^(k(j-1)+1)`` and the target terms ``l'_p(f_k1(..), .., f_kp(..))`` summed
over unshuffles whose blocks are ordered by their first entry, with sign

    chi(s) (-1)^(sum_r (p-r)(k_r-1) + sum_{r<q} |block r| (k_q-1)),

which for a target with only ``l'_1`` and ``l'_2`` is the usual three-block sum
``l'_1 f_m + I + J``.  The same block sum composes morphisms.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq
from sympy.polys.matrices import DomainMatrix

from . import linalg
from .algebra import Q, chi, multi_unshuffles, unshuffles

__all__ = [
    "GradedElement",
    "LInftyStructure",
    "LInftyMorphism",
    "jacobi_residual",
    "morphism_residual",
    "check_generalized_jacobi",
    "check_morphism",
    "compose",
    "compose_low",
    "ChainComplexFD",
    "ChainMapFD",
    "cone",
    "cone_identity",
    "fiber_product",
    "cohomology_dims",
    "is_quasi_isomorphism",
    "check_fiber_hypotheses",
    "CheckResult",
    "sample_tuples",
    "vanishes_by_degree",
    "check_equal_morphisms",
    "identity_map",
]


class GradedElement:
    """A homogeneous element: a degree plus named components.

    Components are any objects supporting ``+``, unary ``-``, scalar ``*`` and
    truth testing (false means zero).  Zero components are dropped.
    """

    __slots__ = ("degree", "parts")

    def __init__(self, degree: int, parts: Mapping | None = None):
        self.degree = degree
        self.parts = {k: v for k, v in (parts or {}).items() if v}

    @classmethod
    def zero(cls, degree: int) -> "GradedElement":
        return cls(degree)

    def get(self, key, default=None):
        return self.parts.get(key, default)

    def __add__(self, other: "GradedElement") -> "GradedElement":
        if other.degree != self.degree:
            raise ValueError(f"adding degree {self.degree} to degree {other.degree}")
        out = dict(self.parts)
        for k, v in other.parts.items():
            if k in out:
                s = out[k] + v
                if s:
                    out[k] = s
                else:
                    del out[k]
            else:
                out[k] = v
        return _raw(self.degree, out)

    def __neg__(self) -> "GradedElement":
        return _raw(self.degree, {k: -v for k, v in self.parts.items()})

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        return self + (-other)

    def __mul__(self, c) -> "GradedElement":
        c = Q(c)
        if not c:
            return _raw(self.degree, {})
        if c == 1:
            return self
        return _raw(self.degree, {k: v * c for k, v in self.parts.items()})

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.parts)

    def is_zero(self) -> bool:
        return not self.parts

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.degree == other.degree and self.parts == other.parts

    __hash__ = None  # mutable-looking value type

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {v}" for k, v in sorted(self.parts.items(), key=lambda kv: str(kv[0])))
        return f"<deg {self.degree}: {inner or '0'}>"


def _raw(degree: int, parts: dict) -> GradedElement:
    e = GradedElement.__new__(GradedElement)
    e.degree = degree
    e.parts = parts
    return e


Sampler = Callable[[random.Random, int], GradedElement]


@dataclass
class LInftyStructure:
    """Graded carrier in degrees ``min_degree..max_degree`` with brackets ``l_k``.

    ``brackets[k]`` takes ``k`` elements and returns their bracket (or ``None``
    for zero).  Arities without an entry are zero.  ``sampler(rng, degree)``
    draws an element of the given degree.
    """

    name: str
    max_degree: int
    brackets: dict[int, Callable[..., GradedElement | None]]
    sampler: Sampler | None = None
    min_degree: int = 0
    top_arity: int | None = None
    info: dict = field(default_factory=dict)

    def degrees(self) -> range:
        return range(self.min_degree, self.max_degree + 1)

    def bracket(self, k: int, *xs: GradedElement) -> GradedElement:
        if len(xs) != k:
            raise ValueError(f"l_{k} needs {k} arguments")
        deg = sum(x.degree for x in xs) + k - 2
        fn = self.brackets.get(k)
        if fn is None or deg > self.max_degree or deg < self.min_degree:
            return GradedElement.zero(deg)
        if any(x.is_zero() for x in xs):
            return GradedElement.zero(deg)
        out = fn(*xs)
        if out is None:
            return GradedElement.zero(deg)
        if out.degree != deg:
            raise AssertionError(f"{self.name}: l_{k} returned degree {out.degree}, expected {deg}")
        return out

    def sample(self, rng: random.Random, degree: int) -> GradedElement:
        if self.sampler is None:
            raise ValueError(f"{self.name} has no sampler")
        return self.sampler(rng, degree)


@dataclass
class LInftyMorphism:
    """Components ``f_k`` of degree ``k - 1`` from ``source`` to ``target``."""

    name: str
    source: LInftyStructure
    target: LInftyStructure
    components: dict[int, Callable[..., GradedElement | None]]

    @property
    def max_arity(self) -> int:
        return max(self.components, default=0)

    def component(self, k: int, *xs: GradedElement) -> GradedElement:
        deg = sum(x.degree for x in xs) + k - 1
        fn = self.components.get(k)
        if fn is None or deg > self.target.max_degree or deg < self.target.min_degree:
            return GradedElement.zero(deg)
        if any(x.is_zero() for x in xs):
            return GradedElement.zero(deg)
        out = fn(*xs)
        if out is None:
            return GradedElement.zero(deg)
        if out.degree != deg:
            raise AssertionError(f"{self.name}: f_{k} returned degree {out.degree}, expected {deg}")
        return out


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------


def _pm(e: int) -> int:
    return -1 if e % 2 else 1


def jacobi_residual(L: LInftyStructure, xs: Sequence[GradedElement]) -> GradedElement:
    m = len(xs)
    degs = [x.degree for x in xs]
    total = GradedElement.zero(sum(degs) + m - 3)
    for k in range(1, m + 1):
        l = m + 1 - k
        for s in unshuffles(k, m):
            inner = L.bracket(k, *(xs[i] for i in s[:k]))
            if inner.is_zero():
                continue
            outer = L.bracket(l, inner, *(xs[i] for i in s[k:]))
            if outer.is_zero():
                continue
            total = total + outer * (chi(s, degs) * _pm(k * (l - 1)))
    return total


@lru_cache(maxsize=None)
def _compositions(m: int, p: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for cuts in itertools.combinations(range(1, m), p - 1):
        bounds = (0,) + cuts + (m,)
        out.append(tuple(bounds[i + 1] - bounds[i] for i in range(p)))
    return tuple(out)


@lru_cache(maxsize=None)
def _ordered_block_unshuffles(sizes: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    starts = list(itertools.accumulate((0,) + sizes[:-1]))
    out = []
    for s in multi_unshuffles(sizes):
        firsts = [s[a] for a in starts]
        if all(firsts[i] < firsts[i + 1] for i in range(len(firsts) - 1)):
            out.append(s)
    return tuple(out)


def _block_sum(
    outer: Callable[..., GradedElement],
    inner: Callable[..., GradedElement],
    xs: Sequence[GradedElement],
    out_degree: int,
    arities: Iterable[int],
    inner_max: int | None = None,
) -> GradedElement:
    """sum over p, block sizes and block-ordered unshuffles of outer_p(inner_k1(..), ..)."""
    m = len(xs)
    degs = [x.degree for x in xs]
    total = GradedElement.zero(out_degree)
    for p in arities:
        if p < 1 or p > m:
            continue
        for sizes in _compositions(m, p):
            if inner_max is not None and max(sizes) > inner_max:
                continue
            starts = list(itertools.accumulate((0,) + sizes[:-1]))
            for s in _ordered_block_unshuffles(sizes):
                vals = []
                block_degs = []
                for r in range(p):
                    block = [xs[i] for i in s[starts[r]:starts[r] + sizes[r]]]
                    block_degs.append(sum(b.degree for b in block))
                    vals.append(inner(sizes[r], *block))
                if any(v.is_zero() for v in vals):
                    continue
                val = outer(p, *vals)
                if val.is_zero():
                    continue
                e = sum((p - 1 - r) * (sizes[r] - 1) for r in range(p))
                e += sum(block_degs[r] * (sizes[q] - 1) for r in range(p) for q in range(r + 1, p))
                total = total + val * (chi(s, degs) * _pm(e))
    return total


def morphism_residual(F: LInftyMorphism, xs: Sequence[GradedElement]) -> GradedElement:
    src, tgt = F.source, F.target
    m = len(xs)
    degs = [x.degree for x in xs]
    out_deg = sum(degs) + m - 2
    tgt_arities = sorted(set(tgt.brackets) | {1})
    total = _block_sum(tgt.bracket, F.component, xs, out_deg, tgt_arities, F.max_arity)
    for k in range(1, m + 1):
        j = m + 1 - k
        if j > F.max_arity:
            continue
        for s in unshuffles(k, m):
            inner = src.bracket(k, *(xs[i] for i in s[:k]))
            if inner.is_zero():
                continue
            val = F.component(j, inner, *(xs[i] for i in s[k:]))
            if val.is_zero():
                continue
            total = total + val * (chi(s, degs) * _pm(k * (j - 1) + 1))
    return total


def compose(F: LInftyMorphism, G: LInftyMorphism, max_arity: int | None = None) -> LInftyMorphism:
    """The composite ``F . G`` as a morphism from G's source to F's target."""
    if G.target is not F.source and G.target.name != F.source.name:
        raise ValueError(f"cannot compose {F.name} after {G.name}")
    top = max_arity if max_arity is not None else max(1, F.max_arity * G.max_arity)

    def make(m: int):
        def comp(*xs: GradedElement) -> GradedElement:
            out_deg = sum(x.degree for x in xs) + m - 1
            return _block_sum(F.component, G.component, xs, out_deg, range(1, F.max_arity + 1), G.max_arity)

        return comp

    return LInftyMorphism(f"{F.name}.{G.name}", G.source, F.target, {m: make(m) for m in range(1, top + 1)})


def compose_low(F: LInftyMorphism, G: LInftyMorphism) -> LInftyMorphism:
    """Arity 1 and 2 of the composite: F_1 G_1 and F_1 G_2 + F_2(G_1, G_1)."""

    def c1(x):
        return F.component(1, G.component(1, x))

    def c2(x, y):
        return F.component(1, G.component(2, x, y)) + F.component(2, G.component(1, x), G.component(1, y))

    return LInftyMorphism(f"{F.name}.{G.name}", G.source, F.target, {1: c1, 2: c2})


# ---------------------------------------------------------------------------
# sampled checks
# ---------------------------------------------------------------------------


@dataclass
class CheckResult:
    """Outcome of a sampled identity check."""

    name: str
    passed: bool
    samples: int
    failures: list = field(default_factory=list)
    note: str = ""

    def __bool__(self) -> bool:
        return self.passed


def sample_tuples(
    L: LInftyStructure,
    m: int,
    count: int,
    rng: random.Random,
    degree_weights: Mapping[int, float] | None = None,
) -> list[list[GradedElement]]:
    """Random m-tuples, preceded by forced degenerate ones (a zero, a repeat)."""
    degs = list(L.degrees())
    weights = [degree_weights.get(k, 0.0) for k in degs] if degree_weights else [4.0] + [1.0] * (len(degs) - 1)
    out: list[list[GradedElement]] = []

    def draw_deg() -> int:
        return rng.choices(degs, weights=weights)[0]

    for i in range(count):
        tup = [L.sample(rng, draw_deg()) for _ in range(m)]
        if i == 0:
            tup[rng.randrange(m)] = GradedElement.zero(tup[0].degree)
            tup[-1 if m > 1 else 0] = GradedElement.zero(tup[-1].degree)
        elif i == 1 and m >= 2:
            tup[1] = tup[0]
        elif i == 2 and m >= 2:
            tup = [L.sample(rng, L.min_degree) for _ in range(m)]
            tup[-1] = tup[0]
        elif i == 3:
            tup = [L.sample(rng, L.min_degree) for _ in range(m)]
        out.append(tup)
    return out


def check_generalized_jacobi(
    L: LInftyStructure,
    m: int,
    samples: Sequence[Sequence[GradedElement]],
) -> CheckResult:
    failures = []
    for idx, xs in enumerate(samples):
        r = jacobi_residual(L, xs)
        if not r.is_zero():
            failures.append({"sample": idx, "residual": repr(r)})
    return CheckResult(f"{L.name}: jacobi m={m}", not failures, len(samples), failures)


def vanishes_by_degree(L: LInftyStructure, m: int) -> bool:
    """True when every term of the arity-m identity lands above the top degree."""
    return m * L.min_degree + m - 3 > L.max_degree


def check_morphism(
    F: LInftyMorphism,
    m: int,
    samples: Sequence[Sequence[GradedElement]],
) -> CheckResult:
    failures = []
    for idx, xs in enumerate(samples):
        r = morphism_residual(F, xs)
        if not r.is_zero():
            failures.append({"sample": idx, "residual": repr(r)})
    return CheckResult(f"{F.name}: morphism m={m}", not failures, len(samples), failures)


def check_equal_morphisms(
    F: LInftyMorphism,
    G: LInftyMorphism,
    arities: Iterable[int],
    samples_by_arity: Mapping[int, Sequence[Sequence[GradedElement]]],
    name: str,
) -> CheckResult:
    failures = []
    total = 0
    for k in arities:
        for idx, xs in enumerate(samples_by_arity[k]):
            total += 1
            diff = F.component(k, *xs) - G.component(k, *xs)
            if not diff.is_zero():
                failures.append({"arity": k, "sample": idx, "difference": repr(diff)})
    return CheckResult(name, not failures, total, failures)


# ---------------------------------------------------------------------------
# finite dimensional complexes
# ---------------------------------------------------------------------------


class ChainComplexFD:
    """``dims[k]`` = dim C_k; ``diff[k]`` is the matrix of d: C_k -> C_(k-1)."""

    def __init__(self, dims: Mapping[int, int], diff: Mapping[int, DomainMatrix] | None = None, name: str = ""):
        self.dims = {k: v for k, v in dims.items()}
        self.name = name
        self.diff: dict[int, DomainMatrix] = {}
        for k in self.dims:
            if k - 1 in self.dims:
                m = (diff or {}).get(k)
                if m is None:
                    m = linalg.zeros(self.dims[k - 1], self.dims[k])
                if m.shape != (self.dims[k - 1], self.dims[k]):
                    raise ValueError(f"d_{k} has shape {m.shape}, expected {(self.dims[k-1], self.dims[k])}")
                self.diff[k] = m

    def dim(self, k: int) -> int:
        return self.dims.get(k, 0)

    def d(self, k: int) -> DomainMatrix:
        if k in self.diff:
            return self.diff[k]
        return linalg.zeros(self.dim(k - 1), self.dim(k))

    def degrees(self) -> list[int]:
        return sorted(self.dims)

    def is_complex(self) -> bool:
        for k in self.dims:
            if k in self.diff and k - 1 in self.diff:
                if not linalg.is_zero(self.diff[k - 1] * self.diff[k]):
                    return False
        return True


class ChainMapFD:
    def __init__(self, source: ChainComplexFD, target: ChainComplexFD, maps: Mapping[int, DomainMatrix]):
        self.source = source
        self.target = target
        self.maps = {}
        for k in set(source.dims) | set(target.dims):
            m = maps.get(k)
            if m is None:
                m = linalg.zeros(target.dim(k), source.dim(k))
            if m.shape != (target.dim(k), source.dim(k)):
                raise ValueError(f"map in degree {k} has shape {m.shape}")
            self.maps[k] = m

    def at(self, k: int) -> DomainMatrix:
        return self.maps.get(k, linalg.zeros(self.target.dim(k), self.source.dim(k)))

    def is_chain_map(self) -> bool:
        for k in self.maps:
            lhs = self.target.d(k) * self.at(k)
            rhs = self.at(k - 1) * self.source.d(k)
            if lhs != rhs:
                return False
        return True

    def is_surjective(self) -> bool:
        return all(linalg.rank(self.at(k)) == self.target.dim(k) for k in self.target.dims)


def cohomology_dims(C: ChainComplexFD) -> dict[int, int]:
    """dim H_k = dim C_k - rank d_k - rank d_(k+1)."""
    out = {}
    for k in C.degrees():
        out[k] = C.dim(k) - linalg.rank(C.d(k)) - linalg.rank(C.d(k + 1))
    return out


def _block(rows: Sequence[int], cols: Sequence[int], blocks: Mapping[tuple[int, int], DomainMatrix]) -> DomainMatrix:
    entries = {}
    r_off = list(itertools.accumulate((0,) + tuple(rows[:-1])))
    c_off = list(itertools.accumulate((0,) + tuple(cols[:-1])))
    for (bi, bj), m in blocks.items():
        for i, row in m.to_sdm().items():
            for j, v in row.items():
                entries[(r_off[bi] + i, c_off[bj] + j)] = v
    return linalg.matrix(sum(rows), sum(cols), entries)


def cone(f: ChainMapFD) -> ChainComplexFD:
    """Cone_k = B_k + A_(k-1) with d(b, a) = (d b + f a, -d a) for f: A -> B."""
    A, B = f.source, f.target
    degs = sorted(set(B.dims) | {k + 1 for k in A.dims})
    dims = {k: B.dim(k) + A.dim(k - 1) for k in degs}
    diff = {}
    for k in degs:
        if k - 1 not in dims:
            continue
        rows = [B.dim(k - 1), A.dim(k - 2)]
        cols = [B.dim(k), A.dim(k - 1)]
        diff[k] = _block(rows, cols, {(0, 0): B.d(k), (0, 1): f.at(k - 1), (1, 1): -A.d(k - 1)})
    return ChainComplexFD(dims, diff, name=f"cone({A.name}->{B.name})")


def identity_map(C: ChainComplexFD) -> ChainMapFD:
    return ChainMapFD(C, C, {k: linalg.identity(C.dim(k)) for k in C.dims})


def cone_identity(C: ChainComplexFD) -> ChainComplexFD:
    """The acyclic cone of the identity, with C_k in the first slot and C_(k-1) in the second."""
    return cone(identity_map(C))


def is_quasi_isomorphism(f: ChainMapFD) -> bool:
    return all(v == 0 for v in cohomology_dims(cone(f)).values())


@dataclass
class FiberProduct:
    complex: ChainComplexFD
    to_left: ChainMapFD
    to_right: ChainMapFD
    inclusion: dict[int, DomainMatrix]


def fiber_product(f: ChainMapFD, g: ChainMapFD) -> FiberProduct:
    """Degreewise kernel of (a, b) -> f a - g b for f: A -> C, g: B -> C."""
    A, B, C = f.source, g.source, f.target
    if g.target is not C and g.target.dims != C.dims:
        raise ValueError("maps must share a target")
    degs = sorted(set(A.dims) | set(B.dims))
    bases: dict[int, DomainMatrix] = {}
    for k in degs:
        m = _block([C.dim(k)], [A.dim(k), B.dim(k)], {(0, 0): f.at(k), (0, 1): -g.at(k)})
        bases[k] = linalg.nullspace_columns(m) if A.dim(k) + B.dim(k) else linalg.zeros(0, 0)
    dims = {k: bases[k].shape[1] for k in degs}
    diff = {}
    for k in degs:
        if k - 1 not in bases:
            continue
        total_d = _block([A.dim(k - 1), B.dim(k - 1)], [A.dim(k), B.dim(k)], {(0, 0): A.d(k), (1, 1): B.d(k)})
        image = total_d * bases[k] if bases[k].shape[1] else linalg.zeros(A.dim(k - 1) + B.dim(k - 1), 0)
        diff[k] = linalg.solve(bases[k - 1], image) if image.shape[1] else linalg.zeros(dims[k - 1], 0)
    P = ChainComplexFD(dims, diff, name=f"{A.name} x_{C.name} {B.name}")
    to_left = {}
    to_right = {}
    for k in degs:
        basis = bases[k]
        proj_a = _block([A.dim(k)], [A.dim(k), B.dim(k)], {(0, 0): linalg.identity(A.dim(k))})
        proj_b = _block([B.dim(k)], [A.dim(k), B.dim(k)], {(0, 1): linalg.identity(B.dim(k))})
        to_left[k] = proj_a * basis if basis.shape[1] else linalg.zeros(A.dim(k), 0)
        to_right[k] = proj_b * basis if basis.shape[1] else linalg.zeros(B.dim(k), 0)
    return FiberProduct(P, ChainMapFD(P, A, to_left), ChainMapFD(P, B, to_right), bases)


@dataclass
class FiberHypotheses:
    fibration: bool
    acyclic: bool
    square_commutes: bool
    pullback: bool
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.fibration and self.acyclic and self.square_commutes and self.pullback


def check_fiber_hypotheses(
    p_A: ChainMapFD,
    B: ChainComplexFD,
    square_check: CheckResult,
    f_1: ChainMapFD,
    L_linear: ChainComplexFD,
    L_to_fiber: dict[int, DomainMatrix] | None = None,
) -> FiberHypotheses:
    """Hypotheses of the homotopy fiber theorem on finite truncations.

    (i) ``p_A: B -> A`` is degreewise onto, (ii) ``B`` is acyclic,
    (iii) the supplied sampled square check passed, and (iv) the linear part
    ``L_linear`` has the dimensions of the fiber product of ``f_1`` and ``p_A``
    (and, if given, the comparison map is an isomorphism of complexes).
    """
    fib = p_A.is_surjective()
    acyc = all(v == 0 for v in cohomology_dims(B).values())
    fp = fiber_product(f_1, p_A)
    dims_ok = all(fp.complex.dim(k) == L_linear.dim(k) for k in set(L_linear.dims) | set(fp.complex.dims))
    iso_ok = True
    if L_to_fiber is not None:
        # express the comparison in fiber coordinates; solve raises if it leaves the fiber
        try:
            coords = {k: linalg.solve(fp.inclusion[k], m) for k, m in L_to_fiber.items() if k in fp.inclusion}
        except ValueError:
            coords = None
        if coords is None:
            iso_ok = False
        else:
            for k, m in coords.items():
                if linalg.rank(m) != L_linear.dim(k) or fp.complex.dim(k) != L_linear.dim(k):
                    iso_ok = False
            for k in coords:
                if k - 1 in coords and fp.complex.d(k) * coords[k] != coords[k - 1] * L_linear.d(k):
                    iso_ok = False
    details = {
        "fiber_dims": {k: fp.complex.dim(k) for k in fp.complex.degrees()},
        "linear_dims": {k: L_linear.dim(k) for k in L_linear.degrees()},
    }
    return FiberHypotheses(fib, acyc, square_check.passed, dims_ok and iso_ok, details)
