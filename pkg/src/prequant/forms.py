"""Polynomial differential forms and multivector fields on a coordinate patch.

Both kinds of object store a map from strictly increasing index tuples to
:class:`~prequant.algebra.Poly` coefficients.  Forms print basis elements as
``dx^dy``; multivectors print ``Dx^Dy``.

Conventions used throughout:

* contraction along a wedge of vector fields applies the first field first,
  ``iota(u ^ v) = iota(v) . iota(u)``;
* ``lie(U, a) = d iota(U) a - (-1)^|U| iota(U) d a``;
* the bracket of multivectors extends ``[U, V]`` on wedges of vector fields by
  ``sum (-1)^(i+j) [u_i, v_j] ^ (rest of U) ^ (rest of V)``.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .algebra import ParseError, Poly, Q, Rational, VariableMismatchError, parse_monomial, split_signed_terms

__all__ = [
    "Patch",
    "PolyForm",
    "PolyMultivector",
    "DegreeError",
    "wedge",
    "d",
    "interior",
    "contract",
    "lie",
    "schouten",
    "poincare_homotopy",
    "euler_field",
    "check_cartan_commutator",
    "check_extended_cartan",
    "check_homotopy_identity",
]


class DegreeError(ValueError):
    """Raised when an operation is applied outside its degree range."""


class Patch:
    """An open subset of R^N with named coordinates."""

    __slots__ = ("names",)

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        for n in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", n) or n.startswith(("d", "D")):
                raise ValueError(f"coordinate name {n!r} is not allowed")
        self.names = names

    @property
    def dim(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, Patch) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Patch({list(self.names)})"

    def coord(self, name: str) -> Poly:
        return Poly.var(name, self.names)

    def const(self, c) -> Poly:
        return Poly.const(c, self.names)

    def zero_poly(self) -> Poly:
        return Poly.zero(self.names)


def _sort_indices(idx: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Sort an index list, returning (sign, sorted) or (0, ()) on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


@lru_cache(maxsize=None)
def _merge(a: tuple, b: tuple) -> tuple[int, tuple]:
    return _sort_indices(a + b)


class _Graded:
    """Shared storage for forms and multivectors: {increasing index tuple: Poly}."""

    __slots__ = ("patch", "degree", "terms")
    _prefix = "?"

    def __init__(self, patch: Patch, degree: int, terms: Mapping[Sequence[int], Poly] | None = None):
        if degree < 0 or degree > patch.dim:
            raise DegreeError(f"degree {degree} outside 0..{patch.dim}")
        self.patch = patch
        self.degree = degree
        clean: dict[tuple, Poly] = {}
        for idx, p in (terms or {}).items():
            sign, key = _sort_indices(idx)
            if len(key) != degree and sign:
                raise DegreeError(f"index tuple {idx} does not have length {degree}")
            if not sign:
                continue
            if not isinstance(p, Poly):
                p = Poly.const(p, patch.names)
            elif p.vars != patch.names:
                p = patch.zero_poly() + p
            p = p if sign == 1 else -p
            if key in clean:
                p = clean[key] + p
            if p:
                clean[key] = p
            else:
                clean.pop(key, None)
        self.terms = clean

    @classmethod
    def _raw(cls, patch: Patch, degree: int, terms: dict):
        obj = cls.__new__(cls)
        obj.patch = patch
        obj.degree = degree
        obj.terms = terms
        return obj

    @classmethod
    def zero(cls, patch: Patch, degree: int):
        if degree < 0 or degree > patch.dim:
            raise DegreeError(f"degree {degree} outside 0..{patch.dim}")
        return cls._raw(patch, degree, {})

    @classmethod
    def basis(cls, patch: Patch, idx: Sequence[int], coeff=1):
        return cls(patch, len(idx), {tuple(idx): coeff})

    @classmethod
    def scalar(cls, patch: Patch, p) -> "_Graded":
        return cls(patch, 0, {(): p})

    def _check(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.patch != self.patch:
            raise VariableMismatchError(f"patch mismatch: {self.patch} vs {other.patch}")
        if other.degree != self.degree:
            raise DegreeError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for k, p in other.terms.items():
            q = out.get(k)
            if q is None:
                out[k] = p
            else:
                q = q + p
                if q:
                    out[k] = q
                else:
                    del out[k]
        return self._raw(self.patch, self.degree, out)

    def __neg__(self):
        return self._raw(self.patch, self.degree, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        """Multiply by a rational or a polynomial function."""
        if isinstance(c, Poly):
            out = {}
            for k, p in self.terms.items():
                q = p * c
                if q:
                    out[k] = q
            return self._raw(self.patch, self.degree, out)
        c = Q(c)
        if not c:
            return self._raw(self.patch, self.degree, {})
        return self._raw(self.patch, self.degree, {k: p * c for k, p in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        return (
            type(other) is type(self)
            and other.patch == self.patch
            and other.degree == self.degree
            and other.terms == self.terms
        )

    def __hash__(self):
        return hash((type(self).__name__, self.patch, self.degree, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, idx: Sequence[int]) -> Poly:
        sign, key = _sort_indices(idx)
        p = self.terms.get(key)
        if p is None or not sign:
            return self.patch.zero_poly()
        return p if sign == 1 else -p

    def poly_degree(self) -> int:
        return max((p.degree() for p in self.terms.values()), default=-1)

    def weight(self) -> int:
        """Largest coefficient degree plus form degree, -1 for zero."""
        if not self.terms:
            return -1
        return self.poly_degree() + self.degree

    def map_coefficients(self, fn):
        out = {}
        for k, p in self.terms.items():
            q = fn(p)
            if q:
                out[k] = q
        return self._raw(self.patch, self.degree, out)

    def evaluate_at_origin(self):
        return self.map_coefficients(lambda p: Poly.const(p.at_origin(), p.vars))

    # -- text --------------------------------------------------------
    def _basis_str(self, key: tuple) -> str:
        return "^".join(f"{self._prefix}{self.patch.names[i]}" for i in key)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        first = True
        for key in sorted(self.terms):
            basis = self._basis_str(key)
            for e, c in self.terms[key].sorted_terms():
                mono = self.terms[key]._monomial_str(e)
                body = f"{abs(c)}*{mono}" if mono else f"{abs(c)}"
                if basis:
                    body = f"{body} {basis}"
                if first:
                    chunks.append(("-" if c < 0 else "") + body)
                    first = False
                else:
                    chunks.append((" - " if c < 0 else " + ") + body)
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({str(self)!r}, degree={self.degree})"

    @classmethod
    def parse(cls, text: str, patch: Patch, degree: int | None = None):
        """Parse text such as ``"x^2*y dx^dy + 3 dz"``.

        The degree is inferred from the basis elements; pass ``degree`` for
        zero or constant-only input.
        """
        text = text.strip()
        terms: dict[tuple, Poly] = {}
        found_deg = None
        if text != "0":
            for sign, body in split_signed_terms(text):
                coeff_part, idx = cls._split_basis(body, patch)
                if found_deg is None:
                    found_deg = len(idx)
                elif found_deg != len(idx):
                    raise ParseError(f"mixed degrees in {text!r}")
                if coeff_part:
                    c, exps = parse_monomial(coeff_part, patch.names)
                else:
                    c, exps = mpq(1), (0,) * patch.dim
                s, key = _sort_indices(idx)
                if not s:
                    continue
                mono = Poly._raw(patch.names, {exps: c * sign * s} if c else {})
                terms[key] = terms.get(key, patch.zero_poly()) + mono
        if degree is None:
            degree = found_deg if found_deg is not None else 0
        elif found_deg is not None and found_deg != degree:
            raise ParseError(f"expected degree {degree}, found {found_deg} in {text!r}")
        return cls(patch, degree, terms)

    @classmethod
    def _split_basis(cls, body: str, patch: Patch) -> tuple[str, tuple[int, ...]]:
        toks = body.split()
        basis_tok = None
        if toks and toks[-1].startswith(cls._prefix) and all(
            t.startswith(cls._prefix) for t in toks[-1].split("^")
        ):
            basis_tok = toks[-1]
            toks = toks[:-1]
        coeff_part = "*".join(toks)
        idx: tuple[int, ...] = ()
        if basis_tok:
            names = [t[len(cls._prefix):] for t in basis_tok.split("^")]
            for n in names:
                if n not in patch.names:
                    raise VariableMismatchError(f"unknown coordinate {n!r} in {basis_tok!r}")
            idx = tuple(patch.names.index(n) for n in names)
        return coeff_part, idx


class PolyForm(_Graded):
    """A differential form with polynomial coefficients."""

    __slots__ = ()
    _prefix = "d"


class PolyMultivector(_Graded):
    """A multivector field with polynomial coefficients."""

    __slots__ = ()
    _prefix = "D"

    @classmethod
    def vector(cls, patch: Patch, components: Sequence) -> "PolyMultivector":
        return cls(patch, 1, {(i,): c for i, c in enumerate(components)})


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def wedge(a: _Graded, b: _Graded) -> _Graded:
    """Exterior product of two forms or of two multivectors."""
    if type(a) is not type(b):
        raise TypeError("wedge needs two forms or two multivectors")
    if a.patch != b.patch:
        raise VariableMismatchError("patch mismatch")
    deg = a.degree + b.degree
    cls = type(a)
    if deg > a.patch.dim:
        return _zero_any(cls, a.patch, deg)
    out: dict[tuple, Poly] = {}
    for ka, pa in a.terms.items():
        for kb, pb in b.terms.items():
            s, key = _merge(ka, kb)
            if not s:
                continue
            prod = pa * pb
            if s < 0:
                prod = -prod
            q = out.get(key)
            out[key] = prod if q is None else q + prod
    return cls._raw(a.patch, deg, {k: p for k, p in out.items() if p})


def _zero_any(cls, patch: Patch, deg: int):
    """Zero object of any degree, including degrees outside 0..dim."""
    obj = cls.__new__(cls)
    obj.patch = patch
    obj.degree = deg
    obj.terms = {}
    return obj


def wedge_all(items: Sequence[_Graded]) -> _Graded:
    if not items:
        raise ValueError("empty wedge")
    out = items[0]
    for it in items[1:]:
        out = wedge(out, it)
    return out


def d(a: PolyForm) -> PolyForm:
    """Exterior derivative."""
    if not isinstance(a, PolyForm):
        raise TypeError("d acts on forms")
    patch = a.patch
    if a.degree >= patch.dim:
        return _zero_any(PolyForm, patch, a.degree + 1)
    out: dict[tuple, Poly] = {}
    for key, p in a.terms.items():
        for i in range(patch.dim):
            if i in key:
                continue
            dp = p.diff(i)
            if not dp:
                continue
            s, new = _merge((i,), key)
            if s < 0:
                dp = -dp
            q = out.get(new)
            out[new] = dp if q is None else q + dp
    return PolyForm._raw(patch, a.degree + 1, {k: p for k, p in out.items() if p})


@lru_cache(maxsize=None)
def _contract_basis(vec_idx: tuple, form_idx: tuple) -> tuple[int, tuple]:
    """iota(D_{i1}^...^D_{iq}) dx^J, applying D_{i1} first."""
    sign = 1
    cur = list(form_idx)
    for i in vec_idx:
        if i not in cur:
            return 0, ()
        p = cur.index(i)
        if p % 2:
            sign = -sign
        del cur[p]
    return sign, tuple(cur)


def interior(v: PolyMultivector, a: PolyForm) -> PolyForm:
    """Contraction of a form by a multivector field, extended linearly."""
    if not isinstance(v, PolyMultivector) or not isinstance(a, PolyForm):
        raise TypeError("interior(multivector, form)")
    if v.patch != a.patch:
        raise VariableMismatchError("patch mismatch")
    deg = a.degree - v.degree
    if deg < 0:
        return _zero_any(PolyForm, a.patch, deg)
    out: dict[tuple, Poly] = {}
    for kv, pv in v.terms.items():
        for ka, pa in a.terms.items():
            s, key = _contract_basis(kv, ka)
            if not s:
                continue
            prod = pv * pa
            if s < 0:
                prod = -prod
            q = out.get(key)
            out[key] = prod if q is None else q + prod
    return PolyForm._raw(a.patch, deg, {k: p for k, p in out.items() if p})


def contract(vs: Sequence[PolyMultivector], a: PolyForm) -> PolyForm:
    """iota(v_1 ^ ... ^ v_k) a, computed as iota(v_k) ... iota(v_1) a."""
    out = a
    for v in vs:
        if out.degree < 0:
            return out
        out = interior(v, out)
    return out


def lie(v: PolyMultivector, a: PolyForm) -> PolyForm:
    """Lie derivative of a form along a multivector field."""
    patch = a.patch
    deg = a.degree - v.degree + 1
    if deg < 0 or deg > patch.dim:
        return _zero_any(PolyForm, patch, deg)
    ia = interior(v, a)
    first = d(ia) if ia.degree >= 0 else PolyForm.zero(patch, deg)
    second = interior(v, d(a))
    return first - second if v.degree % 2 == 0 else first + second


def schouten(u: PolyMultivector, v: PolyMultivector) -> PolyMultivector:
    """Schouten bracket of multivector fields of degree at least one.

    Each basis term ``f D_I`` is read as the wedge ``(f D_{i1}) ^ D_{i2} ^ ...``
    and the wedge formula is applied; coordinate fields commute.
    """
    if not isinstance(u, PolyMultivector) or not isinstance(v, PolyMultivector):
        raise TypeError("schouten needs multivector fields")
    if u.degree < 1 or v.degree < 1:
        raise DegreeError("schouten bracket needs degrees >= 1")
    if u.patch != v.patch:
        raise VariableMismatchError("patch mismatch")
    patch = u.patch
    deg = u.degree + v.degree - 1
    if deg > patch.dim:
        return _zero_any(PolyMultivector, patch, deg)
    out: dict[tuple, Poly] = {}

    def add(coeff: Poly, idx: Sequence[int], sign: int) -> None:
        if not coeff:
            return
        s, key = _sort_indices(idx)
        if not s:
            return
        c = coeff if s * sign > 0 else -coeff
        q = out.get(key)
        out[key] = c if q is None else q + c

    for I, f in u.terms.items():
        for J, g in v.terms.items():
            i1, irest = I[0], I[1:]
            j1, jrest = J[0], J[1:]
            # a = b = 1: [f D_i1, g D_j1] = f d_i1(g) D_j1 - g d_j1(f) D_i1
            add(f * g.diff(i1), (j1,) + irest + jrest, 1)
            add(g * f.diff(j1), (i1,) + irest + jrest, -1)
            # a = 1, b >= 2: [f D_i1, D_jb] = -d_jb(f) D_i1
            for b in range(2, len(J) + 1):
                jb = J[b - 1]
                rest_v = (j1,) + tuple(J[c - 1] for c in range(2, len(J) + 1) if c != b)
                sign = -1 if (1 + b) % 2 else 1
                add(g * f.diff(jb), (i1,) + irest + rest_v, -sign)
            # a >= 2, b = 1: [D_ia, g D_j1] = d_ia(g) D_j1
            for a in range(2, len(I) + 1):
                ia = I[a - 1]
                rest_u = (i1,) + tuple(I[c - 1] for c in range(2, len(I) + 1) if c != a)
                sign = -1 if (a + 1) % 2 else 1
                add(f * g.diff(ia), (j1,) + rest_u + jrest, sign)
    return PolyMultivector._raw(patch, deg, {k: p for k, p in out.items() if p})


def euler_field(patch: Patch) -> PolyMultivector:
    return PolyMultivector.vector(patch, [patch.coord(n) for n in patch.names])


def poincare_homotopy(a: PolyForm) -> PolyForm:
    """The radial homotopy h with d h + h d = id on forms of positive degree."""
    if a.degree < 1:
        raise DegreeError("the homotopy lowers degree; input must have degree >= 1")
    patch = a.patch
    E = euler_field(patch)
    out = PolyForm.zero(patch, a.degree - 1)
    by_weight: dict[int, dict] = {}
    for key, p in a.terms.items():
        for k, part in p.homogeneous_parts().items():
            by_weight.setdefault(k, {})[key] = part
    for k, terms in by_weight.items():
        piece = PolyForm._raw(patch, a.degree, terms)
        out = out + interior(E, piece) * mpq(1, k + a.degree)
    return out


# ---------------------------------------------------------------------------
# identity checkers; each returns the residual, which must vanish
# ---------------------------------------------------------------------------


def cartan_commutator_residual(u: PolyMultivector, v: PolyMultivector, a: PolyForm) -> PolyForm:
    """iota([u,v]) a - ((-1)^((|u|-1)|v|) L_u iota_v a - iota_v L_u a)."""
    lhs = interior(schouten(u, v), a)
    rhs1 = lie(u, interior(v, a))
    rhs2 = interior(v, lie(u, a))
    deg = lhs.degree
    if rhs1.degree != deg or rhs2.degree != deg:
        raise DegreeError("inconsistent degrees")
    sign = -1 if ((u.degree - 1) * v.degree) % 2 else 1
    return lhs - (rhs1 * sign - rhs2)


def check_cartan_commutator(u: PolyMultivector, v: PolyMultivector, a: PolyForm) -> bool:
    return cartan_commutator_residual(u, v, a).is_zero()


def extended_cartan_residual(vs: Sequence[PolyMultivector], beta: PolyForm) -> PolyForm:
    """Residual of the contraction formula for d iota(v_1^...^v_k) beta.

    (-1)^k d iota(v) b = sum_{i<j} (-1)^(i+j) iota([v_i,v_j] ^ v_1..^..^..v_k) b
                         + sum_i (-1)^i iota(v_1..^v_i..v_k) L_{v_i} b
                         + iota(v_1..v_k) d b
    """
    k = len(vs)
    patch = beta.patch
    deg = beta.degree - k + 1
    lhs = d(contract(vs, beta)) * (-1 if k % 2 else 1)
    rhs = PolyForm.zero(patch, deg)
    for i in range(k):
        for j in range(i + 1, k):
            rest = [w for t, w in enumerate(vs) if t not in (i, j)]
            term = contract([schouten(vs[i], vs[j])] + rest, beta)
            rhs = rhs + term * (1 if (i + j) % 2 == 0 else -1)
    for i in range(k):
        rest = [w for t, w in enumerate(vs) if t != i]
        term = contract(rest, lie(vs[i], beta))
        rhs = rhs + term * (-1 if (i + 1) % 2 else 1)
    rhs = rhs + contract(vs, d(beta))
    return lhs - rhs


def check_extended_cartan(vs: Sequence[PolyMultivector], beta: PolyForm) -> bool:
    if any(v.degree != 1 for v in vs):
        raise DegreeError("the contraction formula is for vector fields")
    if len(vs) > beta.degree + 1 or len(vs) < 1:
        raise DegreeError("need 1 <= k <= deg(beta) + 1")
    return extended_cartan_residual(vs, beta).is_zero()


def homotopy_residual(a: PolyForm) -> PolyForm:
    """(d h + h d) a - a for positive degree, h d f - (f - f(0)) in degree zero."""
    if a.degree == 0:
        f = a.coefficient(())
        return poincare_homotopy(d(a)) - PolyForm.scalar(a.patch, f - f.at_origin())
    return d(poincare_homotopy(a)) + poincare_homotopy(d(a)) - a


def check_homotopy_identity(a: PolyForm) -> bool:
    return homotopy_residual(a).is_zero()
