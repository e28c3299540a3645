"""Self-validated high-precision reals: a value plus a certified absolute
error bound.

Every ``BoundedReal`` guarantees that the true mathematical quantity lies in
``[value - abs_error, value + abs_error]``.  Arithmetic propagates bounds
conservatively: each operation adds the worst-case rounding error of the
mpmath computation on top of the propagated input errors.  Comparisons
against exact rationals are three-valued (True / False / undecided) and the
``refine`` helper implements the retry-at-doubled-precision policy used by
all threshold decisions on the irrational arithmetic path.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Optional, Union

import mpmath
from mpmath import mpf

from .errors import DomainError, UndecidableComparison

DEFAULT_BITS = 128
#: precision doublings attempted before a comparison is declared undecidable
MAX_REFINES = 4

Rational = Union[int, Fraction]


def mpf_to_fraction(x: mpf) -> Fraction:
    """Exact conversion: every finite mpf is a binary rational."""
    sign, man, exp, _ = x._mpf_
    if man == 0:
        if x == 0:
            return Fraction(0)
        raise DomainError("cannot convert non-finite mpf to Fraction")
    value = Fraction(man)
    if exp >= 0:
        value *= 1 << exp
    else:
        value /= 1 << (-exp)
    return -value if sign else value


def _round_eps(bits: int) -> mpf:
    # one-ulp relative bound for a correctly rounded op at `bits` precision,
    # with two spare bits because error terms are themselves rounded
    return mpf(2) ** (2 - bits)


class BoundedReal:
    """High-precision float with a certified absolute error bound."""

    __slots__ = ("value", "abs_error", "bits")

    def __init__(self, value: mpf, abs_error: mpf, bits: int = DEFAULT_BITS):
        self.value = value
        self.abs_error = abs_error
        self.bits = bits

    # -- constructors --------------------------------------------------

    @classmethod
    def exact(cls, q: Rational, bits: int = DEFAULT_BITS) -> "BoundedReal":
        q = Fraction(q)
        with mpmath.workprec(bits):
            v = mpf(q.numerator) / mpf(q.denominator)
            err = abs(v) * _round_eps(bits)
            if q.denominator & (q.denominator - 1) == 0:
                # power-of-two denominator: representable exactly
                err = mpf(0)
        return cls(v, err, bits)

    @classmethod
    def from_float(cls, x: float, bits: int = DEFAULT_BITS) -> "BoundedReal":
        return cls.exact(Fraction(x), bits)

    # -- interval endpoints (exact rationals) --------------------------

    def lower(self) -> Fraction:
        return mpf_to_fraction(self.value) - mpf_to_fraction(self.abs_error)

    def upper(self) -> Fraction:
        return mpf_to_fraction(self.value) + mpf_to_fraction(self.abs_error)

    def midpoint_float(self) -> float:
        return float(self.value)

    # -- arithmetic -----------------------------------------------------

    def _coerce(self, other) -> "BoundedReal":
        if isinstance(other, BoundedReal):
            return other
        if isinstance(other, (int, Fraction)):
            return BoundedReal.exact(other, self.bits)
        raise TypeError(f"cannot mix BoundedReal with {type(other)!r}")

    def __add__(self, other) -> "BoundedReal":
        o = self._coerce(other)
        bits = max(self.bits, o.bits)
        with mpmath.workprec(bits):
            v = self.value + o.value
            err = self.abs_error + o.abs_error + abs(v) * _round_eps(bits)
        return BoundedReal(v, err, bits)

    __radd__ = __add__

    def __neg__(self) -> "BoundedReal":
        # even unary minus rounds to the ambient mpmath precision
        with mpmath.workprec(self.bits):
            v = -self.value
        return BoundedReal(v, self.abs_error, self.bits)

    def __sub__(self, other) -> "BoundedReal":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "BoundedReal":
        return self._coerce(other) - self

    def __mul__(self, other) -> "BoundedReal":
        o = self._coerce(other)
        bits = max(self.bits, o.bits)
        with mpmath.workprec(bits):
            v = self.value * o.value
            err = (
                abs(self.value) * o.abs_error
                + abs(o.value) * self.abs_error
                + self.abs_error * o.abs_error
                + abs(v) * _round_eps(bits)
            )
        return BoundedReal(v, err, bits)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "BoundedReal":
        o = self._coerce(other)
        bits = max(self.bits, o.bits)
        with mpmath.workprec(bits):
            if abs(o.value) <= o.abs_error:
                raise DomainError("division by an interval containing zero")
            v = self.value / o.value
            denom = abs(o.value) - o.abs_error
            err = (
                (self.abs_error + abs(v) * o.abs_error) / denom
                + abs(v) * _round_eps(bits)
            )
        return BoundedReal(v, err, bits)

    def __rtruediv__(self, other) -> "BoundedReal":
        return self._coerce(other) / self

    def __abs__(self) -> "BoundedReal":
        with mpmath.workprec(self.bits):
            v = abs(self.value)
        return BoundedReal(v, self.abs_error, self.bits)

    def log(self) -> "BoundedReal":
        """Natural log; requires the interval to stay strictly positive."""
        bits = self.bits
        with mpmath.workprec(bits):
            lo = self.value - self.abs_error
            if lo <= 0:
                raise DomainError("log of an interval reaching zero")
            v = mpmath.log(self.value)
            err = self.abs_error / lo + (abs(v) + 1) * _round_eps(bits)
        return BoundedReal(v, err, bits)

    def exp(self) -> "BoundedReal":
        bits = self.bits
        with mpmath.workprec(bits):
            v = mpmath.exp(self.value)
            err = v * mpmath.expm1(self.abs_error) + abs(v) * _round_eps(bits)
        return BoundedReal(v, err, bits)

    # -- three-valued comparisons vs exact rationals --------------------

    def cmp(self, q: Rational) -> Optional[int]:
        """-1 / +1 when the whole interval is below/above q, else None."""
        q = Fraction(q)
        if self.upper() < q:
            return -1
        if self.lower() > q:
            return 1
        return None

    def lt(self, q: Rational) -> Optional[bool]:
        c = self.cmp(q)
        return None if c is None else c < 0

    def gt(self, q: Rational) -> Optional[bool]:
        c = self.cmp(q)
        return None if c is None else c > 0

    def __repr__(self) -> str:
        return f"BoundedReal({mpmath.nstr(self.value, 20)} +/- {mpmath.nstr(self.abs_error, 3)})"

    def __format__(self, spec: str) -> str:
        return format(self.midpoint_float(), spec)


# -- helpers used across modules ----------------------------------------


def ln_int(n: int, bits: int = DEFAULT_BITS) -> BoundedReal:
    """ln of an exact positive integer."""
    if n <= 0:
        raise DomainError("ln_int needs n > 0")
    with mpmath.workprec(bits):
        v = mpmath.log(n)
        err = (abs(v) + 1) * _round_eps(bits)
    return BoundedReal(v, err, bits)


def ln_fraction(q: Fraction, bits: int = DEFAULT_BITS) -> BoundedReal:
    if q <= 0:
        raise DomainError("ln_fraction needs q > 0")
    return ln_int(q.numerator, bits) - ln_int(q.denominator, bits)


def pow_rational(base: Rational, expo: Fraction, bits: int = DEFAULT_BITS) -> BoundedReal:
    """base**expo for exact rational base > 0 and exact rational exponent.

    Integer exponents are delegated to exact arithmetic by the callers; this
    path is the irrational one (exp(expo * ln base)).
    """
    base = Fraction(base)
    if base <= 0:
        raise DomainError("pow_rational needs base > 0")
    return (ln_fraction(base, bits) * BoundedReal.exact(expo, bits)).exp()


def refine(
    decide: Callable[[int], Optional[bool]],
    bits: int = DEFAULT_BITS,
    name: str = "comparison",
) -> bool:
    """Run ``decide(bits)`` at doubling precision until it returns a bool.

    ``decide`` recomputes the quantities involved at the given precision and
    returns None while the error intervals still straddle the threshold.
    After MAX_REFINES doublings the comparison is declared undecidable.
    """
    for _ in range(MAX_REFINES + 1):
        result = decide(bits)
        if result is not None:
            return result
        bits *= 2
    raise UndecidableComparison(name, bits)
