from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from prequant.algebra import Poly
from prequant.forms import Patch, PolyForm, PolyMultivector
from prequant.observables import PrePlecticPatch

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

R2 = Patch(["x", "y"])
R3 = Patch(["x", "y", "z"])
R4 = Patch(["x", "y", "z", "w"])

rationals = st.builds(Fraction, st.integers(-6, 6), st.integers(1, 5))


def _exponents(n: int, max_deg: int) -> list[tuple[int, ...]]:
    return [e for e in itertools.product(range(max_deg + 1), repeat=n) if sum(e) <= max_deg]


def polys(patch: Patch, max_deg: int = 2, max_terms: int = 3):
    return st.dictionaries(st.sampled_from(_exponents(patch.dim, max_deg)), rationals, max_size=max_terms).map(
        lambda t: Poly(patch.names, t)
    )


def forms(patch: Patch, degree: int, max_deg: int = 2):
    keys = list(itertools.combinations(range(patch.dim), degree))
    return st.dictionaries(st.sampled_from(keys), polys(patch, max_deg), max_size=2).map(
        lambda t: PolyForm(patch, degree, t)
    )


def any_form(patch: Patch, max_deg: int = 2):
    return st.integers(0, patch.dim).flatmap(lambda k: forms(patch, k, max_deg))


def multivectors(patch: Patch, degree: int, max_deg: int = 2):
    keys = list(itertools.combinations(range(patch.dim), degree))
    return st.dictionaries(st.sampled_from(keys), polys(patch, max_deg), max_size=2).map(
        lambda t: PolyMultivector(patch, degree, t)
    )


def vector_fields(patch: Patch, max_deg: int = 2):
    return multivectors(patch, 1, max_deg)


def unit_fields(patch: Patch) -> list[PolyMultivector]:
    n = patch.dim
    return [PolyMultivector.vector(patch, [1 if i == j else 0 for j in range(n)]) for i in range(n)]


@pytest.fixture(scope="session")
def r2_poisson() -> PrePlecticPatch:
    return PrePlecticPatch.from_text(["x", "y"], "dx^dy", "r2")


@pytest.fixture(scope="session")
def r3_volume() -> PrePlecticPatch:
    return PrePlecticPatch.from_text(["x", "y", "z"], "dx^dy^dz", "r3")


@pytest.fixture(scope="session")
def r4_degenerate() -> PrePlecticPatch:
    return PrePlecticPatch.from_text(["x", "y", "z", "w"], "dx^dy^dz + dx^dw^dz", "r4")


@pytest.fixture(scope="session")
def zoo():
    from importlib import resources

    from prequant.datasets import load_zoo

    return load_zoo(str(resources.files("prequant") / "data" / "zoo.yaml"))
