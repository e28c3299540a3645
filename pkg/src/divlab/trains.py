"""Trains: linked decreasing sequences covering the range of f_s.

A *car* is the decreasing sequence f_s(base * p) over ascending primes p not
dividing the base; a *train* chains cars by absorbing the smallest admissible
prime into the base, so each car's infimum equals the supremum of the car
before it.  ``range_solutions`` produces the exact range-point witnesses
n = m * p whose distance to a = f_s(m) is exactly a * m^s / n^s.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Tuple, Union

from .bounded import DEFAULT_BITS, BoundedReal, pow_rational
from .divisor import Exponent, Value, f_s
from .errors import DomainError, InvariantViolation
from .primes import Factorization, shared_table


def _one_plus_p_pow_minus_s(p: int, s: Exponent, bits: int) -> Value:
    if s.is_integer:
        ps = p**s.numeric
        return Fraction(ps + 1, ps)
    return 1 + pow_rational(p, -s.fraction, bits)


def _admissible_primes(base: Factorization, count: int):
    """The `count` smallest primes not dividing the base, ascending."""
    skip = set(base.primes())
    out = []
    for p in shared_table().iter_from(2):
        if p not in skip:
            out.append(p)
            if len(out) == count:
                return out
    return out


@dataclass(frozen=True)
class Car:
    """One decreasing sequence f_s(base * p) over admissible primes p."""

    base: Factorization
    s: Exponent
    entries: Tuple[Tuple[int, Value], ...]
    inf_value: Value

    @property
    def sup_value(self) -> Value:
        return self.entries[0][1]

    def values(self):
        return tuple(v for _, v in self.entries)


@dataclass(frozen=True)
class Train:
    origin: Factorization
    s: Exponent
    cars: Tuple[Car, ...]


@dataclass(frozen=True)
class RangeSolution:
    """Witness n = m*p with f_s(n) - a == a * m^s / n^s, a = f_s(m)."""

    m: Factorization
    p: int
    n: Factorization
    value: Value
    gap: Value
    c_of_a: Value


def car(base: Factorization, s, length: int, bits: int = DEFAULT_BITS) -> Car:
    """Evaluate the first `length` admissible primes via the multiplicative
    shortcut value = f_s(base) * (1 + p^-s)."""
    if length < 1:
        raise DomainError("car needs length >= 1")
    s = Exponent.of(s)
    if s.fraction <= 0:
        raise DomainError("cars decrease only for s > 0")
    base_value = f_s(base, s, bits)
    entries = []
    for p in _admissible_primes(base, length):
        entries.append((p, base_value * _one_plus_p_pow_minus_s(p, s, bits)))
    return Car(base=base, s=s, entries=tuple(entries), inf_value=base_value)


def _strictly_less(a: Value, b: Value) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a < b
    # bounded values: certified order, intervals must be disjoint
    au = a.upper() if isinstance(a, BoundedReal) else Fraction(a)
    bl = b.lower() if isinstance(b, BoundedReal) else Fraction(b)
    return au < bl


def _check_car(c: Car) -> None:
    vals = c.values()
    for i in range(len(vals) - 1):
        if not _strictly_less(vals[i + 1], vals[i]):
            raise InvariantViolation(
                f"car over base {c.base} not strictly decreasing at index {i}"
            )
    for v in vals:
        if not _strictly_less(c.inf_value, v):
            raise InvariantViolation(
                f"car over base {c.base} has a value at or below its infimum"
            )


def train(
    origin: Factorization,
    s,
    car_count: int,
    car_length: int,
    bits: int = DEFAULT_BITS,
) -> Train:
    """Build linked cars by repeatedly absorbing the smallest admissible
    prime; verifies the linkage and ordering invariants before returning."""
    if car_count < 1:
        raise DomainError("train needs car_count >= 1")
    s = Exponent.of(s)
    cars = []
    base = origin
    for _ in range(car_count):
        c = car(base, s, car_length, bits)
        _check_car(c)
        cars.append(c)
        base = base.times_prime(c.entries[0][0])

    for prev, nxt in zip(cars, cars[1:]):
        sup, inf = prev.sup_value, nxt.inf_value
        if isinstance(sup, Fraction) and isinstance(inf, Fraction):
            linked = sup == inf
        else:
            # same construction, evaluated twice: intervals must overlap
            linked = not (_strictly_less(sup, inf) or _strictly_less(inf, sup))
        if not linked:
            raise InvariantViolation("cars are not linked")
        # every value of the next car must exceed every value of this one;
        # both are decreasing so compare the extremes
        if not _strictly_less(prev.values()[0], nxt.values()[-1]):
            raise InvariantViolation("cross-car ordering violated")
    return Train(origin=origin, s=s, cars=tuple(cars))


def range_solutions(
    m: Factorization, s, count: int, bits: int = DEFAULT_BITS
) -> Tuple[RangeSolution, ...]:
    """Solutions n = m*p for the `count` smallest primes p not dividing m.

    In exact mode each gap is verified to equal a * m^s / n^s before the
    solution is emitted.
    """
    if count < 1:
        raise DomainError("range_solutions needs count >= 1")
    s = Exponent.of(s)
    a = f_s(m, s, bits)
    if s.is_integer:
        m_pow_s = Fraction(m.value() ** s.numeric)
    else:
        m_pow_s = pow_rational(m.value(), s.fraction, bits) if m.factors else BoundedReal.exact(1, bits)
    c_of_a = a * m_pow_s
    out = []
    for p in _admissible_primes(m, count):
        n = m.times_prime(p)
        value = a * _one_plus_p_pow_minus_s(p, s, bits)
        gap = value - a
        if s.is_integer:
            n_pow_s = n.value() ** s.numeric
            if gap * n_pow_s != c_of_a:
                raise InvariantViolation(
                    f"range-point identity failed for m={m}, p={p}"
                )
        out.append(
            RangeSolution(m=m, p=p, n=n, value=value, gap=gap, c_of_a=c_of_a)
        )
    return tuple(out)
