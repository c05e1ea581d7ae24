"""Seeded random generators for polynomials, forms and multivector fields."""

from __future__ import annotations

import itertools
import random
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from .algebra import Poly
from .forms import Patch, PolyForm, PolyMultivector

MAX_NUM = 7
MAX_DEN = 7


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def rand_rational(rng: random.Random, allow_zero: bool = False) -> mpq:
    while True:
        num = rng.randint(-MAX_NUM, MAX_NUM)
        if num or allow_zero:
            return mpq(num, rng.randint(1, MAX_DEN))


@lru_cache(maxsize=None)
def monomials(n: int, max_deg: int) -> tuple[tuple[int, ...], ...]:
    """Exponent vectors in n variables of total degree at most max_deg."""
    if max_deg < 0:
        return ()
    out = []
    for deg in range(max_deg + 1):
        for combo in itertools.combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return tuple(out)


def rand_poly(rng: random.Random, variables: Sequence[str], max_deg: int, max_terms: int = 3) -> Poly:
    monos = monomials(len(variables), max_deg)
    if not monos:
        return Poly.zero(variables)
    k = rng.randint(1, min(max_terms, len(monos)))
    return Poly(variables, {e: rand_rational(rng) for e in rng.sample(monos, k)})


def rand_form(rng: random.Random, patch: Patch, degree: int, max_deg: int, max_terms: int = 3) -> PolyForm:
    keys = list(itertools.combinations(range(patch.dim), degree))
    if not keys:
        return PolyForm.zero(patch, degree)
    chosen = rng.sample(keys, rng.randint(1, min(2, len(keys))))
    return PolyForm(patch, degree, {k: rand_poly(rng, patch.names, max_deg, max_terms) for k in chosen})


def rand_multivector(
    rng: random.Random, patch: Patch, degree: int, max_deg: int, max_terms: int = 3
) -> PolyMultivector:
    keys = list(itertools.combinations(range(patch.dim), degree))
    chosen = rng.sample(keys, rng.randint(1, min(3, len(keys))))
    return PolyMultivector(patch, degree, {k: rand_poly(rng, patch.names, max_deg, max_terms) for k in chosen})


def rand_vector_field(rng: random.Random, patch: Patch, max_deg: int, max_terms: int = 3) -> PolyMultivector:
    return rand_multivector(rng, patch, 1, max_deg, max_terms)


def rand_combination(rng: random.Random, basis: Sequence, zero, max_terms: int = 3):
    """A sparse random rational combination of basis elements."""
    if not basis:
        return zero
    out = zero
    for b in rng.sample(list(basis), rng.randint(1, min(max_terms, len(basis)))):
        out = out + b * rand_rational(rng)
    return out
