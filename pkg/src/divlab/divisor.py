"""Exact and error-bounded evaluation of the normalized divisor power sums.

For a factored n and exponent s, ``f_s(n)`` is the divisor power sum
sigma_s(n) divided by n**s, evaluated through the multiplicative prime-power
closed form.  Integer s runs on exact big rationals; fractional s runs on
``BoundedReal`` with conservative error propagation.  ``f_s_brute`` is the
independent oracle used by the test suite: a plain divisor loop that never
touches multiplicativity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .bounded import DEFAULT_BITS, BoundedReal, pow_rational
from .errors import DomainError, ResourceLimitError
from .primes import Factorization, factorize

Value = Union[Fraction, BoundedReal]

#: refuse sigma_s results above this many bits (configurable per call)
DEFAULT_BIGNUM_BITS = 1_000_000


@dataclass(frozen=True)
class Exponent:
    """The exponent s >= 0.  Integers select the exact-rational path; any
    other rational (given e.g. as a decimal literal) selects the bounded
    high-precision path."""

    numeric: Union[int, Fraction]

    def __post_init__(self):
        if self.numeric < 0:
            raise DomainError("exponent must be >= 0")

    @classmethod
    def of(cls, x: Union[int, float, str, Fraction, "Exponent"]) -> "Exponent":
        if isinstance(x, Exponent):
            return x
        if isinstance(x, int):
            return cls(x)
        q = Fraction(str(x)) if isinstance(x, float) else Fraction(x)
        if q.denominator == 1:
            return cls(int(q))
        return cls(q)

    @property
    def is_integer(self) -> bool:
        return isinstance(self.numeric, int)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numeric)

    def __float__(self) -> float:
        return float(self.numeric)

    def __str__(self) -> str:
        if self.is_integer:
            return str(self.numeric)
        return f"{self.numeric.numerator}/{self.numeric.denominator}"


def f_prime_power(p: int, k: int, s, bits: int = DEFAULT_BITS) -> Value:
    """f_s of p**k: (p^{(k+1)s} - 1) / ((p^s - 1) * p^{ks}).

    Exact for integer s >= 1.  s = 0 is rejected here because the closed
    form divides by p^s - 1 = 0; f_s routes that case through the divisor
    count instead.
    """
    s = Exponent.of(s)
    if k < 1:
        raise DomainError("f_prime_power needs k >= 1")
    if s.is_integer:
        si = s.numeric
        if si == 0:
            raise DomainError("s = 0 has no closed form here; use f_s")
        ps = p**si
        return Fraction(ps ** (k + 1) - 1, (ps - 1) * ps**k)
    # bounded path: p^s - p^{-ks} over p^s - 1, each p^x via exp(x ln p)
    ps = pow_rational(p, s.fraction, bits)
    pmks = pow_rational(p, -k * s.fraction, bits)
    return (ps - pmks) / (ps - 1)


def f_s(fact: Factorization, s, bits: int = DEFAULT_BITS) -> Value:
    """Product of f_prime_power over the factorization; 1 for n = 1."""
    s = Exponent.of(s)
    if s.is_integer and s.numeric == 0:
        # divisor count: each prime power contributes k + 1
        out = 1
        for _, k in fact.factors:
            out *= k + 1
        return Fraction(out)
    if s.is_integer:
        prod = Fraction(1)
        for p, k in fact.factors:
            prod *= f_prime_power(p, k, s)
        return prod
    prod = BoundedReal.exact(1, bits)
    for p, k in fact.factors:
        prod = prod * f_prime_power(p, k, s, bits)
    return prod


def sigma_s(fact: Factorization, s: int, max_bits: int = DEFAULT_BIGNUM_BITS) -> int:
    """Exact divisor power sum for integer s >= 0."""
    if not isinstance(s, int) or s < 0:
        raise DomainError("sigma_s needs a nonnegative integer s")
    est = (s + 1) * fact.bit_length_estimate() + 64
    if est > max_bits:
        raise ResourceLimitError(
            f"sigma_s result would need ~{est} bits (> {max_bits})"
        )
    out = 1
    for p, k in fact.factors:
        if s == 0:
            out *= k + 1
        else:
            ps = p**s
            out *= (ps ** (k + 1) - 1) // (ps - 1)
    return out


_BRUTE_LIMIT = 10**7


def divisors(n: int) -> list:
    """All divisors of n by trial division, ascending."""
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d != n // d:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def f_s_brute(n: int, s, bits: int = DEFAULT_BITS) -> Value:
    """Independent oracle: sum d^s over all divisors d of n, divided by n^s,
    via an explicit divisor loop.  No multiplicativity anywhere."""
    if not 1 <= n <= _BRUTE_LIMIT:
        raise DomainError(f"f_s_brute needs 1 <= n <= {_BRUTE_LIMIT}")
    s = Exponent.of(s)
    divs = divisors(n)
    if s.is_integer:
        si = s.numeric
        return Fraction(sum(d**si for d in divs), n**si)
    sf = s.fraction
    total = BoundedReal.exact(0, bits)
    for d in divs:
        total = total + pow_rational(d, sf, bits)
    return total / pow_rational(n, sf, bits)


def f_s_of_int(n: int, s, bits: int = DEFAULT_BITS) -> Value:
    """Convenience wrapper: factorize then evaluate multiplicatively."""
    return f_s(factorize(n), s, bits)
