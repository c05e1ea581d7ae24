"""Box covers, Cech-de Rham cochains and Deligne cocycles.

A cochain assigns a global polynomial form to each simplex of the nerve
(restriction maps are identities).  A :class:`TotElement` of total degree t
stores ``{simplex: form}`` with form degree ``t - (len(simplex) - 1)``.

``d_tot = delta + D''`` with ``D'' = (-1)^i d`` on Cech degree i.
"""

from __future__ import annotations

import itertools
from typing import Callable, Mapping, Sequence

from gmpy2 import mpq

from .algebra import Poly, Q
from .forms import Patch, PolyForm, PolyMultivector, contract, d, interior, lie
from .linfty import ChainComplexFD, cohomology_dims
from .truncation import GradedSpace, OutOfTruncation, SumSpace, matrix_of

__all__ = [
    "Cover",
    "TotElement",
    "res",
    "cech_delta",
    "signed_d",
    "d_tot",
    "iota_tot",
    "lie_tot",
    "DeligneCocycle",
    "check_deligne",
    "InvalidCocycleError",
    "require_cocycle",
    "deligne_from_potential",
    "a_twist",
    "Collation",
    "TotSpace",
    "tot_complex",
    "de_rham_complex",
    "truncated_tot_cohomology",
    "truncated_de_rham_cohomology",
]


def _fmt_bound(b) -> str:
    return "inf" if b is None else str(b)


class Cover:
    """Finitely many open boxes in R^N; ``None`` bounds are infinite."""

    def __init__(self, patch: Patch, boxes: Sequence[Sequence[tuple]], name: str = ""):
        self.patch = patch
        self.name = name
        self.boxes = []
        for box in boxes:
            if len(box) != patch.dim:
                raise ValueError(f"box {box} does not match dimension {patch.dim}")
            clean = []
            for lo, hi in box:
                lo = None if lo is None else Q(lo)
                hi = None if hi is None else Q(hi)
                if lo is not None and hi is not None and not lo < hi:
                    raise ValueError(f"empty interval ({lo}, {hi})")
                clean.append((lo, hi))
            self.boxes.append(tuple(clean))
        if not self.boxes:
            raise ValueError("a cover needs at least one box")
        self.simplices: dict[int, list[tuple[int, ...]]] = {}
        self._all: set[tuple[int, ...]] = set()
        for size in range(1, len(self.boxes) + 1):
            found = [s for s in itertools.combinations(range(len(self.boxes)), size) if self._meets(s)]
            if not found:
                break
            self.simplices[size - 1] = found
            self._all.update(found)

    @classmethod
    def trivial(cls, patch: Patch) -> "Cover":
        return cls(patch, [[(None, None)] * patch.dim], name="trivial")

    def _meets(self, s: Sequence[int]) -> bool:
        for c in range(self.patch.dim):
            los = [self.boxes[a][c][0] for a in s if self.boxes[a][c][0] is not None]
            his = [self.boxes[a][c][1] for a in s if self.boxes[a][c][1] is not None]
            if los and his and not max(los) < min(his):
                return False
        return True

    def in_nerve(self, s: tuple) -> bool:
        return s in self._all

    @property
    def max_cech_degree(self) -> int:
        return max(self.simplices)

    def __len__(self) -> int:
        return len(self.boxes)

    def __repr__(self) -> str:
        return f"Cover({self.name or len(self.boxes)} boxes, nerve={ {k: len(v) for k, v in self.simplices.items()} })"


def _sort_simplex(s: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    s = list(s)
    if len(set(s)) != len(s):
        return 0, ()
    sign = 1
    for i in range(1, len(s)):
        j = i
        while j > 0 and s[j - 1] > s[j]:
            s[j - 1], s[j] = s[j], s[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(s)


class TotElement:
    """An element of the Cech-de Rham total complex of a given total degree."""

    __slots__ = ("cover", "degree", "data")

    def __init__(self, cover: Cover, degree: int, data: Mapping[Sequence[int], PolyForm] | None = None):
        self.cover = cover
        self.degree = degree
        clean: dict[tuple, PolyForm] = {}
        for s, form in (data or {}).items():
            sign, key = _sort_simplex(s)
            if not sign or form is None or not form:
                continue
            if not cover.in_nerve(key):
                raise ValueError(f"simplex {key} is not in the nerve")
            if form.degree != degree - (len(key) - 1):
                raise ValueError(f"component on {key} has form degree {form.degree}, expected {degree - len(key) + 1}")
            form = form if sign > 0 else -form
            if key in clean:
                form = clean[key] + form
            if form:
                clean[key] = form
            else:
                clean.pop(key, None)
        self.data = clean

    @classmethod
    def _raw(cls, cover: Cover, degree: int, data: dict) -> "TotElement":
        t = cls.__new__(cls)
        t.cover = cover
        t.degree = degree
        t.data = data
        return t

    @classmethod
    def zero(cls, cover: Cover, degree: int) -> "TotElement":
        return cls._raw(cover, degree, {})

    def __add__(self, other: "TotElement") -> "TotElement":
        if other.degree != self.degree:
            raise ValueError(f"adding total degree {self.degree} and {other.degree}")
        out = dict(self.data)
        for s, f in other.data.items():
            if s in out:
                g = out[s] + f
                if g:
                    out[s] = g
                else:
                    del out[s]
            else:
                out[s] = f
        return TotElement._raw(self.cover, self.degree, out)

    def __neg__(self) -> "TotElement":
        return TotElement._raw(self.cover, self.degree, {s: -f for s, f in self.data.items()})

    def __sub__(self, other: "TotElement") -> "TotElement":
        return self + (-other)

    def __mul__(self, c) -> "TotElement":
        out = {}
        for s, f in self.data.items():
            g = f * c
            if g:
                out[s] = g
        return TotElement._raw(self.cover, self.degree, out)

    __rmul__ = __mul__

    def __bool__(self) -> bool:
        return bool(self.data)

    def is_zero(self) -> bool:
        return not self.data

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.data
        return isinstance(other, TotElement) and self.degree == other.degree and self.data == other.data

    __hash__ = None

    def component(self, cech_degree: int) -> "TotElement":
        return TotElement._raw(
            self.cover, self.degree, {s: f for s, f in self.data.items() if len(s) - 1 == cech_degree}
        )

    def form_at(self, s: Sequence[int]) -> PolyForm:
        sign, key = _sort_simplex(s)
        deg = self.degree - (len(key) - 1)
        f = self.data.get(key)
        if f is None or not sign:
            return PolyForm.zero(self.cover.patch, deg)
        return f if sign > 0 else -f

    def map_forms(self, fn: Callable[[PolyForm], PolyForm], degree: int) -> "TotElement":
        out = {}
        patch = self.cover.patch
        for s, f in self.data.items():
            fd = degree - (len(s) - 1)
            if fd < 0 or fd > patch.dim:
                continue
            g = fn(f)
            if g:
                out[s] = g
        return TotElement._raw(self.cover, degree, out)

    def truncate(self, max_form_degree: int) -> "TotElement":
        return TotElement._raw(
            self.cover,
            self.degree,
            {s: f for s, f in self.data.items() if f.degree <= max_form_degree},
        )

    def __repr__(self) -> str:
        inner = "; ".join(f"{list(s)}: {f}" for s, f in sorted(self.data.items()))
        return f"Tot[{self.degree}]({inner or '0'})"


def res(cover: Cover, form: PolyForm) -> TotElement:
    """Restriction of a global form to every open."""
    if not form:
        return TotElement.zero(cover, form.degree)
    return TotElement._raw(cover, form.degree, {s: form for s in cover.simplices[0]})


def cech_delta(x: TotElement) -> TotElement:
    cover = x.cover
    out: dict[tuple, PolyForm] = {}
    by_deg: dict[int, list] = {}
    for s in x.data:
        by_deg.setdefault(len(s) - 1, []).append(s)
    for i in by_deg:
        for t in cover.simplices.get(i + 1, []):
            acc = None
            for k in range(len(t)):
                face = t[:k] + t[k + 1:]
                f = x.data.get(face)
                if f is None:
                    continue
                term = f if k % 2 == 0 else -f
                acc = term if acc is None else acc + term
            if acc:
                out[t] = acc
    return TotElement._raw(cover, x.degree + 1, out)


def signed_d(x: TotElement) -> TotElement:
    """D''x = (-1)^i d x on Cech degree i."""
    out = {}
    top = x.cover.patch.dim
    for s, f in x.data.items():
        if f.degree >= top:
            continue
        g = d(f)
        if g:
            out[s] = g if (len(s) - 1) % 2 == 0 else -g
    return TotElement._raw(x.cover, x.degree + 1, out)


def d_tot(x: TotElement, max_form_degree: int | None = None) -> TotElement:
    out = cech_delta(x) + signed_d(x)
    return out.truncate(max_form_degree) if max_form_degree is not None else out


def iota_tot(vs: Sequence[PolyMultivector], x: TotElement) -> TotElement:
    """Componentwise iota(v_1^...^v_k)."""
    k = sum(v.degree for v in vs)
    return x.map_forms(lambda f: contract(vs, f), x.degree - k)


def lie_tot(v: PolyMultivector, x: TotElement) -> TotElement:
    return x.map_forms(lambda f: lie(v, f), x.degree - v.degree + 1)


# ---------------------------------------------------------------------------
# Deligne cocycles
# ---------------------------------------------------------------------------


class DeligneCocycle:
    """A Deligne n-cocycle in additive presentation: a total degree n element.

    Its Cech degree i part is written ``A^(n-i)``; the cocycle conditions are
    ``delta A^(n-i) = (-1)^i d A^(n-i-1)`` for ``0 <= i < n`` and ``delta A^0``
    locally constant.
    """

    def __init__(self, cover: Cover, n: int, A: TotElement, name: str = ""):
        if A.degree != n:
            raise ValueError(f"cocycle must have total degree {n}")
        self.cover = cover
        self.n = n
        self.A = A
        self.name = name

    def part(self, i: int) -> TotElement:
        """A^(n-i), the Cech degree i component."""
        return self.A.component(i)

    def curvature_residual(self, omega: PolyForm) -> dict[str, object]:
        """Failures of the cocycle conditions and of d_tot A = res(omega)."""
        out = {}
        for i in range(self.n):
            lhs = cech_delta(self.part(i))
            rhs = signed_d(self.part(i + 1))  # (-1)^(i+1) d A^(n-i-1)
            diff = lhs + rhs
            if diff:
                out[f"delta A^{self.n - i}"] = diff
        top = cech_delta(self.part(self.n))
        for s, f in top.data.items():
            c = f.coefficient(())
            if c.degree() > 0:
                out["delta A^0 constant"] = top
                break
        dA = d_tot(self.A)
        curv = dA.component(0) - res(self.cover, omega)
        if curv:
            out["curvature"] = curv
        return out

    def is_cocycle(self, omega: PolyForm) -> bool:
        return not self.curvature_residual(omega)


def check_deligne(cocycle: DeligneCocycle, omega: PolyForm) -> dict:
    """Report ``{"passed": bool, "violations": [relation names]}``."""
    if not d(omega).is_zero():
        raise ValueError("omega not closed")
    bad = cocycle.curvature_residual(omega)
    return {"passed": not bad, "violations": sorted(bad)}


class InvalidCocycleError(ValueError):
    """The data fails the Deligne cocycle relations for the given form."""


def require_cocycle(cocycle: DeligneCocycle, omega: PolyForm) -> None:
    """Raise :class:`InvalidCocycleError` naming the violated relations."""
    report = check_deligne(cocycle, omega)
    if not report["passed"]:
        raise InvalidCocycleError(f"invalid cocycle {cocycle.name!r}: " + ", ".join(report["violations"]))


def deligne_from_potential(
    cover: Cover,
    potential: PolyForm,
    gauge: TotElement | None = None,
    constants: Mapping[Sequence[int], object] | None = None,
) -> DeligneCocycle:
    """res(potential) + d_tot(gauge) + a locally constant Cech n-cochain.

    Every such element is a Deligne cocycle for omega = d(potential).
    """
    n = potential.degree
    A = res(cover, potential)
    if gauge is not None:
        if gauge.degree != n - 1:
            raise ValueError("gauge must have total degree n - 1")
        A = A + d_tot(gauge)
    if constants:
        patch = cover.patch
        A = A + TotElement(cover, n, {s: PolyForm.scalar(patch, Q(c)) for s, c in constants.items()})
    return DeligneCocycle(cover, n, A)


def a_twist(cocycle: DeligneCocycle, m: int) -> TotElement:
    """sum_i (-1)^(m i) A^(n-i)."""
    out = TotElement.zero(cocycle.cover, cocycle.n)
    for i in range(cocycle.n + 1):
        part = cocycle.part(i)
        out = out + (part if (m * i) % 2 == 0 else -part)
    return out


# ---------------------------------------------------------------------------
# collation
# ---------------------------------------------------------------------------


class Collation:
    """Cech homotopy K, zig-zag homotopy H and collation map j for weights rho.

    ``rho`` are polynomials with sum one; every open with nonzero weight must
    meet every simplex of the nerve (automatic when the nerve is a full simplex).
    """

    def __init__(self, cover: Cover, weights: Sequence[Poly]):
        if len(weights) != len(cover):
            raise ValueError("one weight per open is required")
        patch = cover.patch
        self.cover = cover
        self.rho = [patch.zero_poly() + w for w in weights]
        total = patch.zero_poly()
        for w in self.rho:
            total = total + w
        if total != Poly.const(1, patch.names):
            raise ValueError(f"weights must sum to one, got {total}")
        for a, w in enumerate(self.rho):
            if not w:
                continue
            for simplices in cover.simplices.values():
                for s in simplices:
                    if a not in s and not cover.in_nerve(tuple(sorted(s + (a,)))):
                        raise ValueError(f"open {a} has nonzero weight but misses simplex {s}")

    def K(self, x: TotElement) -> TotElement:
        """(K x)_{a0..a(i-1)} = sum_a rho_a x_{a, a0..a(i-1)}; zero on Cech degree 0."""
        out: dict[tuple, PolyForm] = {}
        for s, f in x.data.items():
            if len(s) == 1:
                continue
            for pos, a in enumerate(s):
                w = self.rho[a]
                if not w:
                    continue
                face = s[:pos] + s[pos + 1:]
                term = f * w
                if pos % 2:
                    term = -term
                out[face] = out[face] + term if face in out else term
        return TotElement._raw(self.cover, x.degree - 1, {k: v for k, v in out.items() if v})

    def zigzag(self, x: TotElement) -> TotElement:
        """-D'' K."""
        return -signed_d(self.K(x))

    def H(self, x: TotElement) -> TotElement:
        m = x.degree
        out = TotElement.zero(self.cover, m - 1)
        for j in range(1, self.cover.max_cech_degree + 1):
            y = x.component(j)
            if not y:
                continue
            # K (-D''K)^(j-i-1) x_j lands in Cech degree i, for i = j-1 down to 0
            cur = y
            for _ in range(j):
                out = out + self.K(cur)
                cur = self.zigzag(cur)
        return out

    def j(self, x: TotElement) -> PolyForm:
        """Global form sum_a rho_a (sum_j (-D''K)^j x_j)_a."""
        m = x.degree
        patch = self.cover.patch
        acc = TotElement.zero(self.cover, m)
        for j in range(0, self.cover.max_cech_degree + 1):
            cur = x.component(j)
            for _ in range(j):
                cur = self.zigzag(cur)
            acc = acc + cur
        out = PolyForm.zero(patch, m) if 0 <= m <= patch.dim else None
        if out is None:
            return None
        for (a,), f in acc.data.items():
            if self.rho[a]:
                out = out + f * self.rho[a]
        return out

    def homotopy_residual(self, x: TotElement) -> TotElement:
        """x - res(j x) - (d_tot H + H d_tot) x."""
        jx = self.j(x)
        resj = res(self.cover, jx) if jx is not None else TotElement.zero(self.cover, x.degree)
        return x - resj - d_tot(self.H(x)) - self.H(d_tot(x))


# ---------------------------------------------------------------------------
# truncated complexes
# ---------------------------------------------------------------------------


class TotSpace:
    """Coordinates on total degree t cochains whose forms have weight <= W."""

    def __init__(self, cover: Cover, degree: int, weight: int, max_form_degree: int | None = None):
        patch = cover.patch
        self.cover = cover
        self.degree = degree
        top = patch.dim if max_form_degree is None else min(patch.dim, max_form_degree)
        parts = []
        for i, simplices in cover.simplices.items():
            fd = degree - i
            if 0 <= fd <= top:
                for s in simplices:
                    parts.append((s, GradedSpace.forms(patch, fd, weight)))
        self._sum = SumSpace(parts)
        self.dim = self._sum.dim

    def coords(self, x: TotElement) -> dict:
        if x is None:
            return {}
        if x.degree != self.degree:
            raise OutOfTruncation(f"total degree {x.degree} != {self.degree}")
        return self._sum.coords(x.data)

    def element(self, vec) -> TotElement:
        data = {s: f for s, f in self._sum.element(vec).items() if f is not None and f}
        return TotElement(self.cover, self.degree, data)

    def basis(self) -> list:
        return [self.element({i: 1}) for i in range(self.dim)]


def tot_complex(cover: Cover, weight: int, max_form_degree: int | None = None) -> ChainComplexFD:
    """The truncated total complex, with Tot^t placed in homological degree -t."""
    patch = cover.patch
    top_form = patch.dim if max_form_degree is None else max_form_degree
    top = top_form + cover.max_cech_degree
    spaces = {t: TotSpace(cover, t, weight, max_form_degree) for t in range(0, top + 1)}
    diff = {}
    for t in range(0, top):
        diff[-t] = matrix_of(lambda x: d_tot(x, max_form_degree), spaces[t], spaces[t + 1])
    return ChainComplexFD({-t: spaces[t].dim for t in spaces}, diff, name="tot")


def de_rham_complex(patch: Patch, weight: int) -> ChainComplexFD:
    spaces = {j: GradedSpace.forms(patch, j, weight) for j in range(patch.dim + 1)}
    diff = {-j: matrix_of(d, spaces[j], spaces[j + 1]) for j in range(patch.dim)}
    return ChainComplexFD({-j: spaces[j].dim for j in spaces}, diff, name="de Rham")


def truncated_tot_cohomology(cover: Cover, weight: int) -> dict[int, int]:
    """Cohomology dimensions of the weight-truncated total complex, by total degree."""
    h = cohomology_dims(tot_complex(cover, weight))
    return {-k: v for k, v in sorted(h.items(), key=lambda kv: -kv[0])}


def truncated_de_rham_cohomology(patch: Patch, weight: int) -> dict[int, int]:
    h = cohomology_dims(de_rham_complex(patch, weight))
    return {-k: v for k, v in sorted(h.items(), key=lambda kv: -kv[0])}
