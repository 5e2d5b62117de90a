"""Ladder-operator algebra over exact parametric coefficients.

Expressions are finite sums of words in creation/annihilation operators on
integer lattice sites (with an optional flavor index), either bosonic or
fermionic.  Words are kept in a canonical form obtained by commuting factors
that act on distinct modes (picking up fermionic signs); factors on the same
mode never reorder.  Canonicalization therefore applies no commutation
relation: a(1) ad(1) and ad(1) a(1) stay distinct until normal_order is
called explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Tuple

from .coeffs import PC_ONE, PC_ZERO, ParamCoeff, RationalComplex

__all__ = [
    "Statistics",
    "LadderOp",
    "OperatorExpr",
    "Algebra",
    "canonical_word",
    "multiply",
    "commutator",
    "normal_order",
    "adjoint",
]


class Statistics(Enum):
    BOSE = "bose"
    FERMI = "fermi"


@dataclass(frozen=True)
class LadderOp:
    """A single creation (dagger=True) or annihilation operator."""

    dagger: bool
    site: int
    flavor: int = 0

    @property
    def mode(self) -> Tuple[int, int]:
        return (self.flavor, self.site)

    @property
    def sort_key(self) -> Tuple[int, int, int]:
        # creators first, then by flavor, then by site
        return (0 if self.dagger else 1, self.flavor, self.site)

    def conjugate(self) -> "LadderOp":
        return LadderOp(not self.dagger, self.site, self.flavor)

    def __str__(self) -> str:
        name = "ad" if self.dagger else "a"
        if self.flavor:
            return f"{name}({self.site},{self.flavor})"
        return f"{name}({self.site})"


Word = Tuple[LadderOp, ...]


def canonical_word(factors: Iterable[LadderOp], fermi: bool):
    """Canonical representative of a word under distinct-mode commutation.

    Returns (sign, word) with sign in {+1, -1}, or None when the word is
    identically zero (two identical fermionic factors forced adjacent).
    Greedy choice of the smallest movable factor; a factor is movable when
    nothing earlier in the remaining word shares its mode.
    """
    work = list(factors)
    out: list[LadderOp] = []
    sign = 1
    while work:
        best = -1
        best_key = None
        seen = set()
        for pos, f in enumerate(work):
            if f.mode in seen:
                continue
            seen.add(f.mode)
            if best_key is None or f.sort_key < best_key:
                best, best_key = pos, f.sort_key
        f = work.pop(best)
        if fermi and best % 2 == 1:
            sign = -sign
        if fermi and out and out[-1] == f:
            return None
        out.append(f)
    return sign, tuple(out)


def _word_sort_key(word: Word):
    return (len(word), tuple(f.sort_key for f in word))


def _first_inversion(w: list) -> Optional[int]:
    for i in range(len(w) - 1):
        if (not w[i].dagger) and w[i + 1].dagger:
            return i
    return None


def _normal_order_word(word: Word, fermi: bool) -> dict:
    """Fully normal order one word; returns {canonical word: int multiple}."""
    out: dict[Word, int] = {}
    stack = [(1, list(word))]
    while stack:
        sgn, w = stack.pop()
        i = _first_inversion(w)
        if i is None:
            res = canonical_word(w, fermi)
            if res is None:
                continue
            s2, cw = res
            k = out.get(cw, 0) + sgn * s2
            if k:
                out[cw] = k
            else:
                out.pop(cw, None)
            continue
        x, y = w[i], w[i + 1]
        stack.append((-sgn if fermi else sgn, w[:i] + [y, x] + w[i + 2 :]))
        if x.mode == y.mode:
            stack.append((sgn, w[:i] + w[i + 2 :]))
    return out


class OperatorExpr:
    """Sum of ladder-operator words with ParamCoeff coefficients."""

    __slots__ = ("statistics", "_terms")

    def __init__(self, statistics: Statistics, terms: Iterable = ()):
        self.statistics = Statistics(statistics)
        self._terms: dict[Word, ParamCoeff] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for factors, coeff in items:
            self._accumulate(tuple(factors), ParamCoeff.coerce_coeff(coeff))

    @classmethod
    def _from_canonical(cls, statistics: Statistics, terms: dict) -> "OperatorExpr":
        obj = cls.__new__(cls)
        obj.statistics = statistics
        obj._terms = terms
        return obj

    @property
    def fermi(self) -> bool:
        return self.statistics is Statistics.FERMI

    def _accumulate(self, factors: Word, coeff: ParamCoeff) -> None:
        if coeff.is_zero():
            return
        res = canonical_word(factors, self.fermi)
        if res is None:
            return
        sign, cw = res
        acc = self._terms.get(cw, PC_ZERO) + (coeff if sign > 0 else -coeff)
        if acc.is_zero():
            self._terms.pop(cw, None)
        else:
            self._terms[cw] = acc

    def _check(self, other: "OperatorExpr") -> None:
        if self.statistics is not other.statistics:
            raise ValueError("cannot combine expressions with different statistics")

    def _coerce(self, other) -> "OperatorExpr":
        if isinstance(other, OperatorExpr):
            self._check(other)
            return other
        c = ParamCoeff.coerce_coeff(other)
        terms = {} if c.is_zero() else {(): c}
        return OperatorExpr._from_canonical(self.statistics, terms)

    # -- ring operations ----------------------------------------------

    def __add__(self, other) -> "OperatorExpr":
        o = self._coerce(other)
        out = dict(self._terms)
        for w, c in o._terms.items():
            acc = out.get(w, PC_ZERO) + c
            if acc.is_zero():
                out.pop(w, None)
            else:
                out[w] = acc
        return OperatorExpr._from_canonical(self.statistics, out)

    __radd__ = __add__

    def __sub__(self, other) -> "OperatorExpr":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "OperatorExpr":
        return self._coerce(other) + (-self)

    def __neg__(self) -> "OperatorExpr":
        out = {w: -c for w, c in self._terms.items()}
        return OperatorExpr._from_canonical(self.statistics, out)

    def __mul__(self, other) -> "OperatorExpr":
        if isinstance(other, OperatorExpr):
            self._check(other)
            prod = OperatorExpr._from_canonical(self.statistics, {})
            for w1, c1 in self._terms.items():
                for w2, c2 in other._terms.items():
                    prod._accumulate(w1 + w2, c1 * c2)
            return prod
        return self.scale(other)

    def __rmul__(self, other) -> "OperatorExpr":
        # scalars commute with everything, so order is immaterial
        return self.scale(other)

    def scale(self, c) -> "OperatorExpr":
        c = ParamCoeff.coerce_coeff(c)
        if c.is_zero():
            return OperatorExpr._from_canonical(self.statistics, {})
        out = {w: k * c for w, k in self._terms.items()}
        return OperatorExpr._from_canonical(self.statistics, out)

    def commutator(self, other: "OperatorExpr") -> "OperatorExpr":
        """[self, other], fully normal ordered.

        Normal ordering makes the result unique as an operator, so algebraic
        identities (antisymmetry, Jacobi) hold syntactically.
        """
        return (self * other - other * self).normal_order()

    def adjoint(self) -> "OperatorExpr":
        out = OperatorExpr._from_canonical(self.statistics, {})
        for word, coeff in self._terms.items():
            raw = tuple(f.conjugate() for f in reversed(word))
            out._accumulate(raw, coeff.conjugate())
        return out

    def normal_order(self) -> "OperatorExpr":
        acc: dict[Word, ParamCoeff] = {}
        for word, coeff in self._terms.items():
            for nword, k in _normal_order_word(word, self.fermi).items():
                c = acc.get(nword, PC_ZERO) + coeff * k
                if c.is_zero():
                    acc.pop(nword, None)
                else:
                    acc[nword] = c
        return OperatorExpr._from_canonical(self.statistics, acc)

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def terms(self) -> Tuple[Tuple[Word, ParamCoeff], ...]:
        """Terms in deterministic canonical order."""
        return tuple(
            (w, self._terms[w]) for w in sorted(self._terms, key=_word_sort_key)
        )

    def coefficient(self, factors: Iterable[LadderOp]) -> ParamCoeff:
        """Coefficient of the given word (sign-adjusted to its canonical form)."""
        res = canonical_word(tuple(factors), self.fermi)
        if res is None:
            return PC_ZERO
        sign, cw = res
        c = self._terms.get(cw, PC_ZERO)
        return c if sign > 0 else -c

    def degree(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def num_terms(self) -> int:
        return len(self._terms)

    def sites(self) -> frozenset:
        return frozenset(f.site for w in self._terms for f in w)

    def flavors(self) -> frozenset:
        return frozenset(f.flavor for w in self._terms for f in w)

    def parameters(self) -> frozenset:
        """Names of all symbolic parameters appearing in coefficients."""
        return frozenset(s for c in self._terms.values() for s in c.symbols())

    def map_coeffs(self, fn) -> "OperatorExpr":
        out = {}
        for w, c in self._terms.items():
            nc = fn(c)
            if not nc.is_zero():
                out[w] = nc
        return OperatorExpr._from_canonical(self.statistics, out)

    def rename_params(self, mapping: Mapping[str, str]) -> "OperatorExpr":
        return self.map_coeffs(lambda c: c.rename(mapping))

    def __eq__(self, other) -> bool:
        if not isinstance(other, OperatorExpr):
            return NotImplemented
        return self.statistics is other.statistics and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(
            (self.statistics, frozenset((w, c) for w, c in self._terms.items()))
        )

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for word, coeff in self.terms():
            factors = " ".join(str(f) for f in word)
            if factors:
                parts.append(f"({coeff}) {factors}")
            else:
                parts.append(f"({coeff})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        tag = self.statistics.value
        return f"<OperatorExpr[{tag}] {self}>"


@dataclass(frozen=True)
class Algebra:
    """Factory tying new expressions to one choice of statistics.

    When nsites is given, site indices are reduced modulo it at
    construction (periodic lattice).
    """

    statistics: Statistics = Statistics.BOSE
    nsites: Optional[int] = None

    def _site(self, site: int) -> int:
        return site % self.nsites if self.nsites else site

    def zero(self) -> OperatorExpr:
        return OperatorExpr(self.statistics)

    def scalar(self, c) -> OperatorExpr:
        return OperatorExpr(self.statistics, [((), c)])

    def identity(self) -> OperatorExpr:
        return self.scalar(1)

    def a(self, site: int, flavor: int = 0) -> OperatorExpr:
        op = LadderOp(False, self._site(site), flavor)
        return OperatorExpr(self.statistics, [((op,), PC_ONE)])

    def ad(self, site: int, flavor: int = 0) -> OperatorExpr:
        op = LadderOp(True, self._site(site), flavor)
        return OperatorExpr(self.statistics, [((op,), PC_ONE)])

    def number(self, site: int, flavor: int = 0) -> OperatorExpr:
        return self.ad(site, flavor) * self.a(site, flavor)

    def from_word(self, factors: Iterable[LadderOp], coeff=1) -> OperatorExpr:
        word = tuple(
            LadderOp(f.dagger, self._site(f.site), f.flavor) for f in factors
        )
        return OperatorExpr(self.statistics, [(word, coeff)])


def multiply(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return a * b


def commutator(a: OperatorExpr, b: OperatorExpr) -> OperatorExpr:
    return a.commutator(b)


def normal_order(x: OperatorExpr) -> OperatorExpr:
    return x.normal_order()


def adjoint(x: OperatorExpr) -> OperatorExpr:
    return x.adjoint()
