"""Exact scalar arithmetic for operator coefficients.

Coefficients of ladder-operator expressions are polynomials in named real
parameters (couplings, spin length, field strengths) whose numeric parts are
exact rational complex numbers.  Floats only appear once a fully bound
coefficient is evaluated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

__all__ = ["RationalComplex", "ParamCoeff", "Monomial"]

ScalarLike = Union["RationalComplex", Fraction, int]


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


@dataclass(frozen=True)
class RationalComplex:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", _as_fraction(self.re))
        object.__setattr__(self, "im", _as_fraction(self.im))

    @staticmethod
    def coerce(x: ScalarLike) -> "RationalComplex":
        if isinstance(x, RationalComplex):
            return x
        return RationalComplex(_as_fraction(x))

    @staticmethod
    def _try(x):
        if isinstance(x, (RationalComplex, Fraction, int)):
            return RationalComplex.coerce(x)
        return None

    def __add__(self, other: ScalarLike) -> "RationalComplex":
        o = RationalComplex._try(other)
        if o is None:
            return NotImplemented
        return RationalComplex(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other: ScalarLike) -> "RationalComplex":
        o = RationalComplex._try(other)
        if o is None:
            return NotImplemented
        return RationalComplex(self.re - o.re, self.im - o.im)

    def __rsub__(self, other: ScalarLike) -> "RationalComplex":
        o = RationalComplex._try(other)
        if o is None:
            return NotImplemented
        return o - self

    def __neg__(self) -> "RationalComplex":
        return RationalComplex(-self.re, -self.im)

    def __mul__(self, other: ScalarLike) -> "RationalComplex":
        o = RationalComplex._try(other)
        if o is None:
            return NotImplemented
        return RationalComplex(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "RationalComplex":
        o = RationalComplex.coerce(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero RationalComplex")
        return RationalComplex(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def conjugate(self) -> "RationalComplex":
        return RationalComplex(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self) -> bool:
        return not self.is_zero()

    def to_complex(self) -> complex:
        return float(self.re) + 1j * float(self.im)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"

    def __repr__(self) -> str:
        return f"RationalComplex({self})"


RC_ZERO = RationalComplex()
RC_ONE = RationalComplex(Fraction(1))
RC_I = RationalComplex(Fraction(0), Fraction(1))

# A monomial is a sorted tuple of (parameter name, positive exponent) pairs.
Monomial = tuple

_COEFF_TYPE_ERR = "cannot combine ParamCoeff with {}"


def _normalize_monomial(mono) -> Monomial:
    powers: dict[str, int] = {}
    for name, exp in mono:
        if not isinstance(name, str) or not name:
            raise ValueError(f"bad parameter name {name!r}")
        if not isinstance(exp, int):
            raise TypeError(f"exponent for {name!r} must be int")
        powers[name] = powers.get(name, 0) + exp
    for name, exp in powers.items():
        if exp < 0:
            raise ValueError(f"negative exponent for parameter {name!r}")
    return tuple(sorted((n, e) for n, e in powers.items() if e > 0))


def _mono_sort_key(mono: Monomial):
    return (sum(e for _, e in mono), mono)


class ParamCoeff:
    """Polynomial in named real parameters with RationalComplex coefficients.

    Immutable; all arithmetic returns fresh objects.  Parameters are assumed
    real, so conjugation touches only the numeric parts.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, ScalarLike] | None = None):
        clean: dict[Monomial, RationalComplex] = {}
        if terms:
            for mono, c in terms.items():
                c = RationalComplex.coerce(c)
                mono = _normalize_monomial(mono)
                acc = clean.get(mono, RC_ZERO) + c
                if acc.is_zero():
                    clean.pop(mono, None)
                else:
                    clean[mono] = acc
        self._terms = clean

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero() -> "ParamCoeff":
        return ParamCoeff()

    @staticmethod
    def one() -> "ParamCoeff":
        return ParamCoeff({(): RC_ONE})

    @staticmethod
    def i() -> "ParamCoeff":
        return ParamCoeff({(): RC_I})

    @staticmethod
    def scalar(value: ScalarLike) -> "ParamCoeff":
        return ParamCoeff({(): RationalComplex.coerce(value)})

    @staticmethod
    def rational(num: int, den: int = 1) -> "ParamCoeff":
        return ParamCoeff.scalar(Fraction(num, den))

    @staticmethod
    def symbol(name: str, power: int = 1) -> "ParamCoeff":
        if power == 0:
            return ParamCoeff.one()
        return ParamCoeff({((name, power),): RC_ONE})

    @staticmethod
    def coerce_coeff(x) -> "ParamCoeff":
        got = ParamCoeff._try_coerce(x)
        if got is None:
            raise TypeError(_COEFF_TYPE_ERR.format(type(x).__name__))
        return got

    @staticmethod
    def _try_coerce(x) -> "ParamCoeff | None":
        if isinstance(x, ParamCoeff):
            return x
        if isinstance(x, (RationalComplex, Fraction, int)):
            return ParamCoeff.scalar(x)
        return None

    # -- queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(m == () for m in self._terms)

    def constant_value(self) -> RationalComplex:
        """The purely numeric value; raises if any parameter is present."""
        if not self.is_constant():
            raise ValueError(f"coefficient {self} is not constant")
        return self._terms.get((), RC_ZERO)

    def symbols(self) -> frozenset:
        return frozenset(n for mono in self._terms for n, _ in mono)

    def degree(self) -> int:
        if not self._terms:
            return 0
        return max(sum(e for _, e in mono) for mono in self._terms)

    def terms(self):
        """Terms as (monomial, RationalComplex) in canonical order."""
        return tuple(
            (m, self._terms[m]) for m in sorted(self._terms, key=_mono_sort_key)
        )

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other) -> "ParamCoeff":
        o = ParamCoeff._try_coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for mono, c in o._terms.items():
            acc = out.get(mono, RC_ZERO) + c
            if acc.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = acc
        res = ParamCoeff.__new__(ParamCoeff)
        res._terms = out
        return res

    __radd__ = __add__

    def __sub__(self, other) -> "ParamCoeff":
        o = ParamCoeff._try_coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "ParamCoeff":
        o = ParamCoeff._try_coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __neg__(self) -> "ParamCoeff":
        res = ParamCoeff.__new__(ParamCoeff)
        res._terms = {m: -c for m, c in self._terms.items()}
        return res

    def __mul__(self, other) -> "ParamCoeff":
        o = ParamCoeff._try_coerce(other)
        if o is None:
            return NotImplemented
        out: dict[Monomial, RationalComplex] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                mono = _normalize_monomial(m1 + m2)
                acc = out.get(mono, RC_ZERO) + c1 * c2
                if acc.is_zero():
                    out.pop(mono, None)
                else:
                    out[mono] = acc
        res = ParamCoeff.__new__(ParamCoeff)
        res._terms = out
        return res

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "ParamCoeff":
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        out = ParamCoeff.one()
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self) -> "ParamCoeff":
        res = ParamCoeff.__new__(ParamCoeff)
        res._terms = {m: c.conjugate() for m, c in self._terms.items()}
        return res

    def rename(self, mapping: Mapping[str, str]) -> "ParamCoeff":
        """Rename parameters; monomials that collide after renaming merge."""
        out: dict[Monomial, RationalComplex] = {}
        for mono, c in self._terms.items():
            new = _normalize_monomial(
                tuple((mapping.get(n, n), e) for n, e in mono)
            )
            acc = out.get(new, RC_ZERO) + c
            if acc.is_zero():
                out.pop(new, None)
            else:
                out[new] = acc
        res = ParamCoeff.__new__(ParamCoeff)
        res._terms = out
        return res

    def evaluate(self, bindings: Mapping[str, complex]) -> complex:
        """Substitute numeric values for every parameter and sum."""
        total = 0j
        for mono, c in self._terms.items():
            val = c.to_complex()
            for name, exp in mono:
                if name not in bindings:
                    raise KeyError(f"unbound parameter {name!r}")
                val *= complex(bindings[name]) ** exp
            total += val
        return total

    # -- identity -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (RationalComplex, Fraction, int)):
            other = ParamCoeff.scalar(other)
        if not isinstance(other, ParamCoeff):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces = []
        for mono in sorted(self._terms, key=_mono_sort_key):
            c = self._terms[mono]
            negative = (c.im == 0 and c.re < 0) or (c.re == 0 and c.im < 0)
            if negative:
                c = -c
            body = []
            if not (c == RC_ONE and mono):
                body.append(str(c))
            for name, exp in mono:
                body.append(name if exp == 1 else f"{name}^{exp}")
            text = " ".join(body)
            if not pieces:
                pieces.append(("-" if negative else "") + text)
            else:
                pieces.append(("- " if negative else "+ ") + text)
        return " ".join(pieces)

    def __repr__(self) -> str:
        return f"ParamCoeff({self})"


PC_ZERO = ParamCoeff.zero()
PC_ONE = ParamCoeff.one()
