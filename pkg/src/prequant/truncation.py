"""Finite dimensional slices of form and multivector spaces.

A form of degree p is kept when its weight, coefficient degree plus p, is at
most the bound; the exterior derivative and the radial homotopy both preserve
weight, so the slices form subcomplexes with the expected cohomology.  Vector
fields are bounded by coefficient degree.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Mapping, Sequence

from gmpy2 import mpq
from sympy.polys.matrices import DomainMatrix

from . import linalg
from .algebra import Poly
from .forms import Patch, PolyForm, PolyMultivector
from .sampling import monomials


class OutOfTruncation(ValueError):
    """Raised when an element does not lie in the requested slice."""


class GradedSpace:
    """Coordinates on {index tuple: Poly} objects with bounded coefficient degree."""

    def __init__(self, patch: Patch, degree: int, max_coeff_degree: int, cls=PolyForm):
        self.patch = patch
        self.degree = degree
        self.cls = cls
        self.max_coeff_degree = max_coeff_degree
        keys = list(itertools.combinations(range(patch.dim), degree)) if 0 <= degree <= patch.dim else []
        self.basis_keys = [(k, e) for k in keys for e in monomials(patch.dim, max_coeff_degree)]
        self.index = {b: i for i, b in enumerate(self.basis_keys)}

    @classmethod
    def forms(cls, patch: Patch, degree: int, max_weight: int) -> "GradedSpace":
        return cls(patch, degree, max_weight - degree, PolyForm)

    @classmethod
    def vector_fields(cls, patch: Patch, max_coeff_degree: int) -> "GradedSpace":
        return cls(patch, 1, max_coeff_degree, PolyMultivector)

    @property
    def dim(self) -> int:
        return len(self.basis_keys)

    def coords(self, obj) -> dict[int, mpq]:
        out = {}
        if obj is None or not obj:
            return out
        if obj.degree != self.degree:
            raise OutOfTruncation(f"degree {obj.degree} != {self.degree}")
        for k, p in obj.terms.items():
            for e, c in p.terms.items():
                i = self.index.get((k, e))
                if i is None:
                    raise OutOfTruncation(f"term {k}, {e} outside the slice")
                out[i] = c
        return out

    def element(self, vec: Mapping[int, object]):
        terms: dict[tuple, dict] = {}
        for i, c in vec.items():
            if c:
                k, e = self.basis_keys[i]
                terms.setdefault(k, {})[e] = c
        if not (0 <= self.degree <= self.patch.dim):
            return None
        return self.cls(self.patch, self.degree, {k: Poly(self.patch.names, t) for k, t in terms.items()})

    def basis(self) -> list:
        return [self.element({i: 1}) for i in range(self.dim)]


class SumSpace:
    """Direct sum of named spaces; elements are dicts {name: object}."""

    def __init__(self, parts: Sequence[tuple[object, object]]):
        self.parts = list(parts)
        self.offsets = {}
        off = 0
        for name, sp in self.parts:
            self.offsets[name] = off
            off += sp.dim
        self.dim = off

    def coords(self, obj: Mapping) -> dict[int, mpq]:
        out = {}
        known = {name for name, _ in self.parts}
        for name, val in obj.items():
            if name not in known:
                if val:
                    raise OutOfTruncation(f"component {name!r} outside the slice")
                continue
            sp = dict(self.parts)[name]
            off = self.offsets[name]
            for i, c in sp.coords(val).items():
                out[off + i] = c
        return out

    def element(self, vec: Mapping[int, object]) -> dict:
        out = {}
        for name, sp in self.parts:
            off = self.offsets[name]
            sub = {i - off: c for i, c in vec.items() if off <= i < off + sp.dim}
            out[name] = sp.element(sub)
        return out

    def basis(self) -> list:
        return [self.element({i: 1}) for i in range(self.dim)]


def matrix_of(fn: Callable, domain, codomain) -> DomainMatrix:
    """Matrix of a linear map given on domain basis elements."""
    cols = [codomain.coords(fn(b)) for b in domain.basis()]
    return linalg.from_columns(codomain.dim, cols)


def column_vector(coords: Mapping[int, object], dim: int) -> DomainMatrix:
    return linalg.from_columns(dim, [coords])


class SubSpace:
    """A subspace of an ambient coordinate space, given by basis columns."""

    def __init__(self, ambient, basis_matrix: DomainMatrix):
        self.ambient = ambient
        self.B = basis_matrix
        self.dim = basis_matrix.shape[1]

    def coords(self, obj) -> dict[int, mpq]:
        col = column_vector(self.ambient.coords(obj), self.ambient.dim)
        x = linalg.solve(self.B, col)
        return linalg.column(x, 0)

    def element(self, vec: Mapping[int, object]):
        amb = {}
        sdm = self.B.to_sdm()
        for i, row in sdm.items():
            s = sum((row[j] * vec[j] for j in row if j in vec), mpq(0))
            if s:
                amb[i] = s
        return self.ambient.element(amb)

    def basis(self) -> list:
        return [self.element({i: 1}) for i in range(self.dim)]


def kernel_subspace(fn: Callable, domain, codomain) -> SubSpace:
    return SubSpace(domain, linalg.nullspace_columns(matrix_of(fn, domain, codomain)))


def image_subspace(fn: Callable, domain, codomain) -> SubSpace:
    return SubSpace(codomain, linalg.column_space_basis(matrix_of(fn, domain, codomain)))


class GradedSlice:
    """Present a SumSpace (or a SubSpace of one) as a space of GradedElements."""

    def __init__(self, space, degree: int):
        from .linfty import GradedElement

        self._elem = GradedElement
        self.space = space
        self.degree = degree
        self.dim = space.dim

    def coords(self, x) -> dict[int, mpq]:
        if x.degree != self.degree:
            raise OutOfTruncation(f"degree {x.degree} != {self.degree}")
        return self.space.coords(dict(x.parts))

    def element(self, vec: Mapping[int, object]):
        parts = {k: v for k, v in self.space.element(vec).items() if v is not None}
        return self._elem(self.degree, parts)

    def basis(self) -> list:
        return [self.element({i: 1}) for i in range(self.dim)]


def constrained_slice(ambient: GradedSlice, constraint: Callable, codomain) -> SubSpace:
    """Kernel of a linear constraint on a graded slice, as a SubSpace."""
    return SubSpace(ambient, linalg.nullspace_columns(matrix_of(constraint, ambient, codomain)))


def slice_chain_map(
    source: Mapping[int, object],
    target: Mapping[int, object],
    source_l1: Callable,
    target_l1: Callable,
    f1: Callable,
    name: str = "",
) -> dict:
    """Matrices of l_1 on both slices and of f1 between them, with the cone test.

    Slices are indexed by homological degree; ``l1`` maps degree k to k - 1.
    """
    from .linfty import ChainComplexFD, ChainMapFD, GradedElement, is_quasi_isomorphism

    def complex_of(spaces, l1, label):
        diff = {}
        for k in spaces:
            if k - 1 in spaces:
                diff[k] = matrix_of(lambda x: l1(x) or GradedElement.zero(k - 1), spaces[k], spaces[k - 1])
        return ChainComplexFD({k: sp.dim for k, sp in spaces.items()}, diff, label)

    C = complex_of(source, source_l1, f"{name} source")
    Cp = complex_of(target, target_l1, f"{name} target")
    maps = {k: matrix_of(f1, source[k], target[k]) for k in source}
    f = ChainMapFD(C, Cp, maps)
    return {
        "source_dims": dict(C.dims),
        "target_dims": dict(Cp.dims),
        "chain_map": f.is_chain_map(),
        "quasi_isomorphism": is_quasi_isomorphism(f),
        "map": f,
    }
