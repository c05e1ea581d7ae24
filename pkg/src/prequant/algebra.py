"""Exact rational polynomials and graded sign bookkeeping.

Coefficients are ``gmpy2.mpq`` values: arbitrary precision, always reduced,
positive denominator.  A :class:`Poly` is a sparse map from exponent tuples
to nonzero rationals over a fixed ordered tuple of variable names.
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from gmpy2 import mpq

Rational = type(mpq(0))

__all__ = [
    "Rational",
    "Q",
    "Poly",
    "VariableMismatchError",
    "ParseError",
    "perm_sign",
    "koszul_sign",
    "chi",
    "unshuffles",
    "multi_unshuffles",
]


class VariableMismatchError(ValueError):
    """Raised when two polynomials cannot be aligned by variable name."""


class ParseError(ValueError):
    """Raised on malformed textual input."""


def Q(value, den=None) -> Rational:
    """Coerce ints, strings like ``"3/2"``, Fractions and mpq to ``mpq``."""
    if den is not None:
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        return mpq(value, den)
    if isinstance(value, Rational):
        return value
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ParseError(f"not a rational literal: {value!r}")
        if text.endswith("/0"):
            raise ZeroDivisionError("zero denominator")
        return mpq(text)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    try:
        return mpq(value)
    except (TypeError, ValueError) as exc:
        raise TypeError(f"cannot coerce {value!r} to a rational") from exc


def _fmt_rational(c: Rational) -> str:
    return str(c)


def _add_exps(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


class Poly:
    """Sparse polynomial with rational coefficients.

    >>> x = Poly.var("x", ("x", "y"))
    >>> str(x * x * Q(3, 2) - Poly.var("y", ("x", "y")))
    '3/2*x^2 - 1*y'
    """

    __slots__ = ("vars", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(variables)
        clean: dict[tuple, Rational] = {}
        if terms:
            n = len(self.vars)
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != n or any(e < 0 for e in exps):
                    raise ValueError(f"bad exponent vector {exps} for {self.vars}")
                c = Q(c)
                if c:
                    clean[exps] = clean.get(exps, 0) + c
                    if not clean[exps]:
                        del clean[exps]
        self.terms = clean

    @classmethod
    def _raw(cls, variables: tuple, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.vars = variables
        p.terms = terms
        return p

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Poly":
        return cls._raw(tuple(variables), {})

    @classmethod
    def const(cls, c, variables: Sequence[str]) -> "Poly":
        variables = tuple(variables)
        c = Q(c)
        return cls._raw(variables, {(0,) * len(variables): c} if c else {})

    @classmethod
    def var(cls, name: str, variables: Sequence[str]) -> "Poly":
        variables = tuple(variables)
        exps = tuple(1 if v == name else 0 for v in variables)
        if name not in variables:
            raise VariableMismatchError(f"{name!r} not among {variables}")
        return cls._raw(variables, {exps: mpq(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], c, variables: Sequence[str]) -> "Poly":
        return cls(variables, {tuple(exps): c})

    # -- alignment -----------------------------------------------------
    def _align(self, other: "Poly") -> "Poly":
        if other.vars == self.vars:
            return other
        if not other.vars and not self.vars:
            return other
        if not other.vars:
            c = other.terms.get((), 0)
            return Poly.const(c, self.vars)
        if set(other.vars) != set(self.vars):
            raise VariableMismatchError(f"cannot align {other.vars} with {self.vars}")
        idx = [other.vars.index(v) for v in self.vars]
        return Poly._raw(self.vars, {tuple(e[i] for i in idx): c for e, c in other.terms.items()})

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            return self._align(other)
        return Poly.const(other, self.vars)

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e)
            if s is None:
                out[e] = c
            else:
                s = s + c
                if s:
                    out[e] = s
                else:
                    del out[e]
        return Poly._raw(self.vars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Q(other)
            if not c:
                return Poly._raw(self.vars, {})
            return Poly._raw(self.vars, {e: k * c for e, k in self.terms.items()})
        other = self._align(other)
        out: dict[tuple, Rational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exps(e1, e2)
                s = out.get(e)
                out[e] = c1 * c2 if s is None else s + c1 * c2
        return Poly._raw(self.vars, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(1, self.vars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            try:
                other = self._align(other)
            except VariableMismatchError:
                return False
            return self.terms == other.terms
        try:
            return self.terms == Poly.const(other, self.vars).terms
        except TypeError:
            return NotImplemented

    def __hash__(self) -> int:
        return hash((self.vars, frozenset(self.terms.items())))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- calculus ------------------------------------------------------
    def diff(self, var: int | str) -> "Poly":
        i = self.vars.index(var) if isinstance(var, str) else var
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                out[e[:i] + (k - 1,) + e[i + 1:]] = c * k
        return Poly._raw(self.vars, out)

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        return max((sum(e) for e in self.terms), default=-1)

    def evaluate(self, point: Mapping[str, object] | Sequence) -> Rational:
        if isinstance(point, Mapping):
            vals = [Q(point[v]) for v in self.vars]
        else:
            vals = [Q(p) for p in point]
        total = mpq(0)
        for e, c in self.terms.items():
            t = c
            for v, k in zip(vals, e):
                if k:
                    t = t * v**k
            total += t
        return total

    def at_origin(self) -> Rational:
        return self.terms.get((0,) * len(self.vars), mpq(0))

    def homogeneous_parts(self) -> dict[int, "Poly"]:
        parts: dict[int, dict] = {}
        for e, c in self.terms.items():
            parts.setdefault(sum(e), {})[e] = c
        return {k: Poly._raw(self.vars, t) for k, t in parts.items()}

    def items(self) -> Iterator[tuple[tuple, Rational]]:
        return iter(self.terms.items())

    # -- text ----------------------------------------------------------
    def sorted_terms(self) -> list[tuple[tuple, Rational]]:
        # graded reverse order: highest total degree first, then lex descending
        return sorted(self.terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def _monomial_str(self, exps: tuple) -> str:
        parts = []
        for v, k in zip(self.vars, exps):
            if k == 1:
                parts.append(v)
            elif k > 1:
                parts.append(f"{v}^{k}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        chunks = []
        for idx, (e, c) in enumerate(self.sorted_terms()):
            mono = self._monomial_str(e)
            body = f"{abs(c)}*{mono}" if mono else f"{abs(c)}"
            if idx == 0:
                chunks.append(("-" if c < 0 else "") + body)
            else:
                chunks.append((" - " if c < 0 else " + ") + body)
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, vars={self.vars})"

    @classmethod
    def parse(cls, text: str, variables: Sequence[str]) -> "Poly":
        """Parse a sum of monomials such as ``"3/2*x^2*y - z + 4"``."""
        variables = tuple(variables)
        out = Poly.zero(variables)
        for sign, body in split_signed_terms(text):
            coeff, exps = parse_monomial(body, variables)
            out = out + Poly._raw(variables, {exps: sign * coeff} if coeff else {})
        return out


_TERM_SPLIT = re.compile(r"\s*([+-])\s*")


def split_signed_terms(text: str) -> list[tuple[int, str]]:
    """Split ``"a - b + c"`` into ``[(1, "a"), (-1, "b"), (1, "c")]``.

    A ``-`` directly following ``^`` is rejected since exponents are nonnegative.
    """
    text = text.strip()
    if not text:
        raise ParseError("empty expression")
    out: list[tuple[int, str]] = []
    sign = 1
    buf = ""
    i = 0
    if text[0] in "+-":
        sign = -1 if text[0] == "-" else 1
        i = 1
    while i < len(text):
        ch = text[i]
        if ch in "+-" and buf.strip() and not buf.rstrip().endswith("/"):
            out.append((sign, buf.strip()))
            sign = -1 if ch == "-" else 1
            buf = ""
        else:
            buf += ch
        i += 1
    if not buf.strip():
        raise ParseError(f"dangling sign in {text!r}")
    out.append((sign, buf.strip()))
    return out


_FACTOR = re.compile(r"^(?:(\d+(?:/\d+)?)|([A-Za-z_][A-Za-z_0-9]*)(?:\^(\d+))?)$")


def parse_monomial(body: str, variables: tuple) -> tuple[Rational, tuple]:
    coeff = mpq(1)
    exps = [0] * len(variables)
    for factor in body.replace(" ", "").split("*"):
        m = _FACTOR.match(factor)
        if not m:
            raise ParseError(f"bad factor {factor!r} in {body!r}")
        if m.group(1) is not None:
            coeff = coeff * Q(m.group(1))
        else:
            name = m.group(2)
            if name not in variables:
                raise VariableMismatchError(f"unknown variable {name!r}; expected one of {variables}")
            exps[variables.index(name)] += int(m.group(3) or 1)
    return coeff, tuple(exps)


# ---------------------------------------------------------------------------
# signs and shuffles
# ---------------------------------------------------------------------------


def perm_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as the sequence of images (any labels)."""
    inv = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
    return -1 if inv % 2 else 1


def koszul_sign(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of reordering ``x_1..x_n`` into ``x_perm[0]..x_perm[n-1]``.

    ``perm`` lists 0-based source indices; ``degrees[i]`` is the degree of ``x_i``.
    """
    e = 0
    for a, b in itertools.combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            e += degrees[perm[a]] * degrees[perm[b]]
    return -1 if e % 2 else 1


def chi(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Antisymmetric Koszul sign: permutation sign times Koszul sign."""
    e = 0
    for a, b in itertools.combinations(range(len(perm)), 2):
        if perm[a] > perm[b]:
            e += 1 + degrees[perm[a]] * degrees[perm[b]]
    return -1 if e % 2 else 1


@lru_cache(maxsize=None)
def _unshuffles(k: int, n: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for first in itertools.combinations(range(n), k):
        rest = tuple(i for i in range(n) if i not in first)
        out.append(first + rest)
    return tuple(out)


def unshuffles(k: int, n: int) -> tuple[tuple[int, ...], ...]:
    """All (k, n-k) unshuffles of ``range(n)`` as 0-based image sequences."""
    if k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    return _unshuffles(k, n)


@lru_cache(maxsize=None)
def multi_unshuffles(sizes: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Unshuffles of ``range(sum(sizes))`` into consecutive blocks of the given sizes."""
    n = sum(sizes)

    def rec(remaining: tuple[int, ...], sizes_left: tuple[int, ...]) -> Iterable[tuple[int, ...]]:
        if not sizes_left:
            yield ()
            return
        k = sizes_left[0]
        for block in itertools.combinations(remaining, k):
            rest = tuple(i for i in remaining if i not in block)
            for tail in rec(rest, sizes_left[1:]):
                yield block + tail

    return tuple(rec(tuple(range(n)), tuple(sizes)))
