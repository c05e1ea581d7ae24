"""Load patches, covers, Deligne cocycles and Lie algebras from YAML.

The default file is ``data/zoo.yaml`` inside the package; the environment
variable ``PREQUANT_DATA`` (a file or a directory holding ``zoo.yaml``)
overrides it.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from .algebra import Poly, Q
from .cech import Cover, DeligneCocycle, TotElement, deligne_from_potential
from .forms import Patch, PolyForm
from .observables import FDLieAlgebra, PrePlecticPatch

__all__ = ["DataError", "Zoo", "CoverData", "CocycleData", "default_data_path", "load_zoo"]

ENV_VAR = "PREQUANT_DATA"
SCHEMA = 1


class DataError(ValueError):
    """Unreadable or inconsistent data file."""


@dataclass
class CoverData:
    name: str
    cover: Cover
    weights: list[Poly]


@dataclass
class CocycleData:
    name: str
    patch: PrePlecticPatch
    cocycle: DeligneCocycle


@dataclass
class Zoo:
    source: str
    patches: dict[str, PrePlecticPatch] = field(default_factory=dict)
    covers: dict[str, CoverData] = field(default_factory=dict)
    cocycles: dict[str, CocycleData] = field(default_factory=dict)
    lie_algebras: dict[str, FDLieAlgebra] = field(default_factory=dict)

    def cocycles_of_degree(self, n: int) -> list[CocycleData]:
        return [c for _, c in sorted(self.cocycles.items()) if c.patch.n == n]


def default_data_path() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("prequant") / "data" / "zoo.yaml"))


def _resolve(path: str | os.PathLike | None) -> Path:
    p = Path(path) if path is not None else default_data_path()
    if p.is_dir():
        p = p / "zoo.yaml"
    if not p.is_file():
        raise DataError(f"data file not found: {p}")
    return p


def _simplex(key: Any) -> tuple[int, ...]:
    if isinstance(key, int):
        return (key,)
    try:
        return tuple(int(t) for t in str(key).split(","))
    except ValueError as exc:
        raise DataError(f"bad simplex key {key!r}") from exc


def _bound(b):
    return None if b is None else Q(b)


def _cover(name: str, spec: dict, patch: Patch | None = None) -> CoverData:
    coords = spec.get("coords")
    if patch is None:
        if not coords:
            raise DataError(f"cover {name}: coords missing")
        patch = Patch(coords)
    boxes = [[(_bound(lo), _bound(hi)) for lo, hi in box] for box in spec.get("boxes", [])]
    if not boxes:
        raise DataError(f"cover {name}: no boxes")
    try:
        cover = Cover(patch, boxes, name)
        weights = [Poly.parse(str(w), patch.names) for w in spec.get("weights", [])]
    except (ValueError, TypeError) as exc:
        raise DataError(f"cover {name}: {exc}") from exc
    return CoverData(name, cover, weights)


def _table(cover: Cover, degree: int, table: dict, what: str) -> TotElement:
    patch = cover.patch
    data = {}
    for key, text in (table or {}).items():
        s = _simplex(key)
        fd = degree - (len(s) - 1)
        try:
            data[s] = PolyForm.parse(str(text), patch, fd)
        except ValueError as exc:
            raise DataError(f"{what} on {key}: {exc}") from exc
    try:
        return TotElement(cover, degree, data)
    except ValueError as exc:
        raise DataError(f"{what}: {exc}") from exc


def _cocycle(name: str, spec: dict, zoo: Zoo) -> CocycleData:
    try:
        P = zoo.patches[spec["patch"]]
        cov = zoo.covers[spec["cover"]].cover
    except KeyError as exc:
        raise DataError(f"cocycle {name}: unknown reference {exc}") from exc
    if cov.patch != P.patch:
        raise DataError(f"cocycle {name}: cover {spec['cover']} lives on other coordinates")
    n = P.n
    if "A" in spec:
        A = _table(cov, n, spec["A"], f"cocycle {name}")
        cocycle = DeligneCocycle(cov, n, A, name)
    elif "potential" in spec:
        pot = PolyForm.parse(str(spec["potential"]), P.patch, n)
        gauge = _table(cov, n - 1, spec["gauge"], f"cocycle {name} gauge") if spec.get("gauge") else None
        consts = {_simplex(k): Q(v) for k, v in (spec.get("constants") or {}).items()}
        try:
            cocycle = deligne_from_potential(cov, pot, gauge, consts)
        except ValueError as exc:
            raise DataError(f"cocycle {name}: {exc}") from exc
        cocycle.name = name
    else:
        raise DataError(f"cocycle {name}: give either A or potential")
    return CocycleData(name, P, cocycle)


def _lie_algebra(name: str, spec: dict) -> FDLieAlgebra:
    dim = int(spec["dim"])
    consts = {}
    for key, vec in (spec.get("brackets") or {}).items():
        i, j = _simplex(key)
        consts[(i, j)] = {int(k): Q(v) for k, v in vec.items()}
    g = FDLieAlgebra(dim, consts, name)
    for (i, j), vec in consts.items():
        if i == j and vec:
            raise DataError(f"lie algebra {name}: [e{i}, e{i}] must vanish")
        if (j, i) in consts and i != j and any(consts[(j, i)].get(k, 0) != -v for k, v in vec.items()):
            raise DataError(f"lie algebra {name}: structure constants not antisymmetric")
    if not g.check_jacobi():
        raise DataError(f"lie algebra {name}: Jacobi identity fails")
    return g


def load_zoo(path: str | os.PathLike | None = None) -> Zoo:
    """Parse and validate a data file.

    Raises :class:`DataError` for malformed data and ``NotClosedError`` (a
    ``ValueError`` with message "omega not closed") for a non-closed form.
    """
    p = _resolve(path)
    try:
        raw = yaml.safe_load(p.read_text())
    except yaml.YAMLError as exc:
        raise DataError(f"{p}: {exc}") from exc
    if not isinstance(raw, dict):
        raise DataError(f"{p}: expected a mapping at top level")
    if raw.get("schema", SCHEMA) != SCHEMA:
        raise DataError(f"{p}: unsupported schema {raw.get('schema')}")
    zoo = Zoo(str(p))
    for name, spec in (raw.get("patches") or {}).items():
        try:
            patch = Patch(spec["coords"])
            omega = PolyForm.parse(str(spec["omega"]), patch)
        except (KeyError, ValueError) as exc:
            raise DataError(f"patch {name}: {exc}") from exc
        zoo.patches[name] = PrePlecticPatch(patch, omega, name)
    for name, spec in (raw.get("covers") or {}).items():
        zoo.covers[name] = _cover(name, spec)
    for name, spec in (raw.get("cocycles") or {}).items():
        zoo.cocycles[name] = _cocycle(name, spec, zoo)
    for name, spec in (raw.get("lie_algebras") or {}).items():
        zoo.lie_algebras[name] = _lie_algebra(name, spec)
    return zoo
