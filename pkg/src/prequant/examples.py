"""Example bundles: a structure, its cocycle data and bracket tables on canonical elements."""

from __future__ import annotations

import itertools
import json
from pathlib import Path

from gmpy2 import mpq

from .forms import PolyForm, PolyMultivector
from .linfty import GradedElement, check_generalized_jacobi, sample_tuples
from .observables import (
    FDLieAlgebra,
    PrePlecticPatch,
    build_observables,
    kks_cocycle,
    obs_pair,
    restrict_cocycle,
    solve_hamiltonian,
    string_cocycle,
    string_lie2,
)

__all__ = ["build_example", "example_data"]


def _q(x) -> str:
    return str(mpq(x))


def _elem(x: GradedElement) -> dict:
    return {"degree": x.degree, "parts": {str(k): str(v) for k, v in sorted(x.parts.items(), key=lambda kv: str(kv[0]))}}


def _fields(P: PrePlecticPatch) -> list[PolyMultivector]:
    n = P.patch.dim
    return [PolyMultivector.vector(P.patch, [1 if i == j else 0 for j in range(n)]) for i in range(n)]


def _observables_bundle(kind: str, P: PrePlecticPatch, pairs: list[GradedElement]) -> dict:
    L = build_observables(P)
    F = kks_cocycle(P)
    table = []
    for k in range(2, P.n + 2):
        for xs in itertools.combinations(pairs, k):
            table.append({"arity": k, "inputs": [_elem(x) for x in xs], "output": _elem(L.bracket(k, *xs))})
    cocycle = []
    for k in range(1, P.n + 2):
        for xs in itertools.combinations(pairs, k):
            vs = [GradedElement(0, {"v": x.get("v")}) for x in xs]
            cocycle.append({"arity": k, "fields": [str(x.get("v")) for x in xs], "value": _elem(F.component(k, *vs))})
    return {
        "kind": kind,
        "structure": {"coords": list(P.patch.names), "omega": str(P.omega), "n": P.n,
                      "brackets": "l_1 = d, l_2 = [v1, v2] + iota(v1^v2) omega, l_k = bracket_sign(k) iota(v_1^...^v_k) omega"},
        "cocycle": cocycle,
        "summary": {"brackets": table},
    }


def _poisson_r2() -> dict:
    P = PrePlecticPatch.from_text(["x", "y"], "dx^dy", "r2")
    dx, dy = _fields(P)
    pairs = [obs_pair(dx, PolyForm.parse("-y", P.patch, 0)), obs_pair(dy, PolyForm.parse("x", P.patch, 0))]
    return _observables_bundle("poisson-r2", P, pairs)


def _r3_2plectic() -> dict:
    P = PrePlecticPatch.from_text(["x", "y", "z"], "dx^dy^dz", "r3")
    dx, dy, dz = _fields(P)
    pairs = [obs_pair(dx, PolyForm.parse("-y dz", P.patch, 1)), obs_pair(dy, PolyForm.parse("x dz", P.patch, 1)),
             solve_hamiltonian(P, dz)]
    return _observables_bundle("r3-2plectic", P, pairs)


def _string_su2() -> dict:
    g = FDLieAlgebra.su2()
    mu = string_cocycle(g)
    killing = [[_q(g.killing(i, j)) for j in range(g.dim)] for i in range(g.dim)]
    L = string_lie2(g)
    basis = [GradedElement(0, {i: mpq(1)}) for i in range(g.dim)]
    import random

    rng = random.Random(0)
    jac = all(check_generalized_jacobi(L, m, sample_tuples(L, m, 20, rng)).passed for m in range(1, 5))
    return {
        "kind": "string-su2",
        "structure": {"algebra": "su2", "dim": g.dim,
                      "brackets": {f"{i},{j}": {str(k): _q(c) for k, c in sorted(v.items())}
                                   for (i, j), v in sorted(g.c.items()) if i < j}},
        "cocycle": {"normalization": "Killing form", "killing": killing,
                    "mu": {f"{i},{j},{k}": _q(mu(i, j, k)) for i, j, k in itertools.permutations(range(3))},
                    "ce_cocycle": g.is_cocycle(mu, 3)},
        "summary": {"l3(e0,e1,e2)": _elem(L.bracket(3, *basis)), "jacobi_m_le_4": jac},
    }


def _heisenberg_r2() -> dict:
    P = PrePlecticPatch.from_text(["x", "y"], "dx^dy", "r2")
    g = FDLieAlgebra.abelian(2)
    c = restrict_cocycle(P, g, _fields(P))
    ext = g.central_extension(lambda i, j: c(i, j))
    table = {f"{i},{j}": {str(k): _q(v) for k, v in sorted(ext.c.get((i, j), {}).items())}
             for i, j in itertools.combinations(range(ext.dim), 2)}
    return {
        "kind": "heisenberg-r2",
        "structure": {"algebra": "R^2 acting by translations", "coords": ["x", "y"], "omega": str(P.omega)},
        "cocycle": {"c": {f"{i},{j}": _q(c(i, j)) for i, j in itertools.product(range(2), repeat=2)},
                    "ce_cocycle": g.is_cocycle(c, 2)},
        "summary": {"dim": ext.dim, "brackets": table, "jacobi": ext.check_jacobi()},
    }


_BUILDERS = {
    "poisson-r2": _poisson_r2,
    "r3-2plectic": _r3_2plectic,
    "string-su2": _string_su2,
    "heisenberg-r2": _heisenberg_r2,
}


def example_data(kind: str) -> dict:
    if kind not in _BUILDERS:
        raise KeyError(f"unknown example {kind!r}")
    return _BUILDERS[kind]()


def build_example(kind: str, out: Path) -> Path:
    """Write ``<out>/<kind>.json`` and return its path."""
    data = example_data(kind)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{kind}.json"
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path
