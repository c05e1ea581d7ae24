"""Exact sparse linear algebra over Q, backed by sympy's DomainMatrix."""

from __future__ import annotations

from typing import Mapping, Sequence

from gmpy2 import mpq
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

SparseCols = list[dict[int, mpq]]


def matrix(rows: int, cols: int, entries: Mapping[tuple[int, int], object]) -> DomainMatrix:
    data: dict[int, dict[int, object]] = {}
    for (i, j), v in entries.items():
        if v:
            data.setdefault(i, {})[j] = QQ.convert(v)
    return DomainMatrix(data, (rows, cols), QQ)


def from_columns(rows: int, columns: Sequence[Mapping[int, object]]) -> DomainMatrix:
    entries = {}
    for j, col in enumerate(columns):
        for i, v in col.items():
            entries[(i, j)] = v
    return matrix(rows, len(columns), entries)


def zeros(rows: int, cols: int) -> DomainMatrix:
    return DomainMatrix({}, (rows, cols), QQ)


def identity(n: int) -> DomainMatrix:
    return matrix(n, n, {(i, i): 1 for i in range(n)})


def rank(m: DomainMatrix) -> int:
    r, c = m.shape
    if r == 0 or c == 0:
        return 0
    return m.rank()


def nullspace_columns(m: DomainMatrix) -> DomainMatrix:
    """Columns spanning the kernel, as an (ncols x k) matrix."""
    r, c = m.shape
    if c == 0:
        return zeros(0, 0)
    if r == 0:
        return identity(c)
    ns = m.nullspace()
    if ns.shape[0] == 0:
        return zeros(c, 0)
    return ns.transpose()


def column_space_basis(m: DomainMatrix) -> DomainMatrix:
    """A subset of columns forming a basis of the column space."""
    r, c = m.shape
    if r == 0 or c == 0:
        return zeros(r, 0)
    _, pivots = m.rref()
    cols = m.to_sdm()
    entries = {}
    for new_j, j in enumerate(pivots):
        for i, row in cols.items():
            if j in row:
                entries[(i, new_j)] = row[j]
    return matrix(r, len(pivots), entries)


def solve(basis: DomainMatrix, target: DomainMatrix) -> DomainMatrix:
    """Coordinates X with basis * X = target; raises if not in the span."""
    r, k = basis.shape
    _, t = target.shape
    if k == 0:
        if any(target.to_sdm().values()):
            raise ValueError("target not in span of empty basis")
        return zeros(0, t)
    aug = basis.hstack(target)
    red, pivots = aug.rref()
    if any(p >= k for p in pivots):
        raise ValueError("target not in the span of the basis")
    rows = red.to_sdm()
    entries = {}
    for row_i, p in enumerate(pivots):
        row = rows.get(row_i, {})
        for j in range(t):
            v = row.get(k + j)
            if v:
                entries[(p, j)] = v
    return matrix(k, t, entries)


def is_zero(m: DomainMatrix) -> bool:
    return not any(row for row in m.to_sdm().values())


def column(m: DomainMatrix, j: int) -> dict[int, mpq]:
    out = {}
    for i, row in m.to_sdm().items():
        if j in row and row[j]:
            out[i] = row[j]
    return out
