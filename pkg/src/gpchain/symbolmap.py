"""Classical symbols of ladder expressions.

Replacing a -> phi and ad -> phi* in a word gives its naive symbol; doing
so after normal ordering gives the Wick symbol (the coherent-state
expectation value).  The difference between the two is the ordering
correction picked up when a product of ladder operators is read off in
written order instead of normal order.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .coeffs import PC_ZERO, ParamCoeff
from .opalg import OperatorExpr, Statistics


@dataclass(frozen=True)
class FieldFactor:
    """One classical field factor, phi or its conjugate, at a mode."""

    conj: bool
    site: int
    flavor: int = 0

    def __post_init__(self):
        if not isinstance(self.site, int):
            raise TypeError("site must be int")
        if not isinstance(self.flavor, int) or self.flavor < 0:
            raise ValueError("flavor must be a nonnegative int")

    @property
    def sort_key(self):
        # conjugated factors first, mirroring normal order of the ladder side
        return (0 if self.conj else 1, self.flavor, self.site)

    def conjugate(self) -> "FieldFactor":
        return FieldFactor(not self.conj, self.site, self.flavor)

    def __str__(self) -> str:
        name = "phi*" if self.conj else "phi"
        if self.flavor:
            return f"{name}({self.site},{self.flavor})"
        return f"{name}({self.site})"


# A monomial is a sorted tuple of (FieldFactor, positive exponent) pairs.
FieldMonomial = Tuple


def _normalize_field_monomial(factors) -> FieldMonomial:
    powers: dict[FieldFactor, int] = {}
    for item in factors:
        if isinstance(item, FieldFactor):
            f, e = item, 1
        else:
            f, e = item
        if not isinstance(f, FieldFactor):
            raise TypeError(f"expected FieldFactor, got {type(f).__name__}")
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a nonnegative int")
        powers[f] = powers.get(f, 0) + e
    return tuple(
        sorted(((f, e) for f, e in powers.items() if e > 0),
               key=lambda fe: fe[0].sort_key)
    )


def _field_mono_key(mono: FieldMonomial):
    deg = sum(e for _, e in mono)
    return (deg, tuple((f.sort_key, e) for f, e in mono))


class FieldPoly:
    """Polynomial in commuting field variables phi/phi* with ParamCoeff coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        out: dict[FieldMonomial, ParamCoeff] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for mono, coeff in items:
                mono = _normalize_field_monomial(mono)
                c = ParamCoeff.coerce_coeff(coeff)
                acc = out.get(mono, PC_ZERO) + c
                if acc.is_zero():
                    out.pop(mono, None)
                else:
                    out[mono] = acc
        self._terms = out

    @staticmethod
    def _from_canonical(terms: dict) -> "FieldPoly":
        res = FieldPoly.__new__(FieldPoly)
        res._terms = terms
        return res

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero() -> "FieldPoly":
        return FieldPoly._from_canonical({})

    @staticmethod
    def scalar(c) -> "FieldPoly":
        c = ParamCoeff.coerce_coeff(c)
        return FieldPoly._from_canonical({} if c.is_zero() else {(): c})

    @staticmethod
    def phi(site: int, flavor: int = 0) -> "FieldPoly":
        f = FieldFactor(False, site, flavor)
        return FieldPoly._from_canonical({((f, 1),): ParamCoeff.one()})

    @staticmethod
    def phi_star(site: int, flavor: int = 0) -> "FieldPoly":
        f = FieldFactor(True, site, flavor)
        return FieldPoly._from_canonical({((f, 1),): ParamCoeff.one()})

    @staticmethod
    def from_monomial(factors: Iterable, coeff=1) -> "FieldPoly":
        return FieldPoly([(tuple(factors), coeff)])

    # -- ring operations ----------------------------------------------

    def _coerce(self, other) -> "FieldPoly":
        if isinstance(other, FieldPoly):
            return other
        return FieldPoly.scalar(other)

    def __add__(self, other) -> "FieldPoly":
        o = self._coerce(other)
        out = dict(self._terms)
        for m, c in o._terms.items():
            acc = out.get(m, PC_ZERO) + c
            if acc.is_zero():
                out.pop(m, None)
            else:
                out[m] = acc
        return FieldPoly._from_canonical(out)

    __radd__ = __add__

    def __sub__(self, other) -> "FieldPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "FieldPoly":
        return self._coerce(other) + (-self)

    def __neg__(self) -> "FieldPoly":
        return FieldPoly._from_canonical({m: -c for m, c in self._terms.items()})

    def __mul__(self, other) -> "FieldPoly":
        if isinstance(other, FieldPoly):
            out: dict[FieldMonomial, ParamCoeff] = {}
            for m1, c1 in self._terms.items():
                for m2, c2 in other._terms.items():
                    mono = _normalize_field_monomial(m1 + m2)
                    acc = out.get(mono, PC_ZERO) + c1 * c2
                    if acc.is_zero():
                        out.pop(mono, None)
                    else:
                        out[mono] = acc
            return FieldPoly._from_canonical(out)
        return self.scale(other)

    def __rmul__(self, other) -> "FieldPoly":
        return self.scale(other)

    def scale(self, c) -> "FieldPoly":
        c = ParamCoeff.coerce_coeff(c)
        if c.is_zero():
            return FieldPoly.zero()
        return FieldPoly._from_canonical({m: k * c for m, k in self._terms.items()})

    def conjugate(self) -> "FieldPoly":
        out: dict[FieldMonomial, ParamCoeff] = {}
        for mono, c in self._terms.items():
            cm = _normalize_field_monomial((f.conjugate(), e) for f, e in mono)
            out[cm] = c.conjugate()
        return FieldPoly._from_canonical(out)

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def terms(self):
        """Terms in deterministic canonical order."""
        return tuple(
            (m, self._terms[m]) for m in sorted(self._terms, key=_field_mono_key)
        )

    def coefficient(self, factors: Iterable) -> ParamCoeff:
        mono = _normalize_field_monomial(
            (f, 1) if isinstance(f, FieldFactor) else f for f in factors
        )
        return self._terms.get(mono, PC_ZERO)

    def degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def num_terms(self) -> int:
        return len(self._terms)

    def sites(self) -> frozenset:
        return frozenset(f.site for m in self._terms for f, _ in m)

    def flavors(self) -> frozenset:
        return frozenset(f.flavor for m in self._terms for f, _ in m)

    def parameters(self) -> frozenset:
        return frozenset(s for c in self._terms.values() for s in c.symbols())

    def filter_degree(self, degree: int) -> "FieldPoly":
        """The part whose monomials have the given total field degree."""
        out = {
            m: c for m, c in self._terms.items()
            if sum(e for _, e in m) == degree
        }
        return FieldPoly._from_canonical(out)

    def map_coeffs(self, fn) -> "FieldPoly":
        out = {}
        for m, c in self._terms.items():
            nc = fn(c)
            if not nc.is_zero():
                out[m] = nc
        return FieldPoly._from_canonical(out)

    def rename_params(self, mapping: Mapping[str, str]) -> "FieldPoly":
        return self.map_coeffs(lambda c: c.rename(mapping))

    # -- evaluation ----------------------------------------------------

    def evaluate(self, values, bindings=None) -> complex:
        """Numeric value of the polynomial at a field configuration.

        values may be a callable (site, flavor) -> complex, a 1- or 2-d
        array (indexed [site] or [flavor, site]), or a mapping keyed by
        (site, flavor).  Terms are accumulated with compensated summation.
        """
        lookup = _field_lookup(values)
        total = 0j
        comp = 0j
        for mono, coeff in self._terms.items():
            x = complex(coeff.evaluate(bindings or {}))
            for f, e in mono:
                v = lookup(f.site, f.flavor)
                if f.conj:
                    v = v.conjugate()
                x *= v ** e
            y = x - comp
            t = total + y
            comp = (t - total) - y
            total = t
        return total

    # -- comparisons and display --------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, FieldPoly):
            return self._terms == other._terms
        try:
            o = FieldPoly.scalar(other)
        except TypeError:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for mono, coeff in self.terms():
            factors = " ".join(
                str(f) if e == 1 else f"{f}^{e}" for f, e in mono
            )
            if factors:
                parts.append(f"({coeff}) {factors}")
            else:
                parts.append(f"({coeff})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"<FieldPoly {self}>"


def _field_lookup(values):
    if callable(values):
        return values
    if isinstance(values, Mapping):
        return lambda site, flavor: complex(values[(site, flavor)])
    arr = np.asarray(values)
    ndim = arr.ndim
    values = arr
    if ndim == 1:
        def one_flavor(site, flavor):
            if flavor != 0:
                raise IndexError("1-d field values but nonzero flavor requested")
            return complex(values[site])
        return one_flavor
    if ndim == 2:
        return lambda site, flavor: complex(values[flavor, site])
    raise ValueError("field values array must be 1- or 2-d")


def naive_symbol(expr: OperatorExpr) -> FieldPoly:
    """Replace each ladder factor by its field in written (canonical) order."""
    out: dict[FieldMonomial, ParamCoeff] = {}
    for word, coeff in expr.terms():
        mono = _normalize_field_monomial(
            FieldFactor(f.dagger, f.site, f.flavor) for f in word
        )
        acc = out.get(mono, PC_ZERO) + coeff
        if acc.is_zero():
            out.pop(mono, None)
        else:
            out[mono] = acc
    return FieldPoly._from_canonical(out)


def wick_symbol(expr: OperatorExpr) -> FieldPoly:
    """Coherent-state expectation value: the naive symbol after normal ordering."""
    if expr.statistics is Statistics.FERMI:
        raise ValueError(
            "wick symbol of a fermionic expression is Grassmann-valued; "
            "only bosonic expressions are supported"
        )
    return naive_symbol(expr.normal_order())


def ordering_correction(expr: OperatorExpr) -> FieldPoly:
    """wick_symbol(expr) - naive_symbol(expr)."""
    return wick_symbol(expr) - naive_symbol(expr)
