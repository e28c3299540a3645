import math
from fractions import Fraction

import mpmath
import pytest

from divlab.bounded import (
    BoundedReal,
    ln_fraction,
    ln_int,
    mpf_to_fraction,
    pow_rational,
    refine,
)
from divlab.errors import DomainError, UndecidableComparison


def contains(b: BoundedReal, true_frac: Fraction) -> bool:
    return b.lower() <= true_frac <= b.upper()


def test_exact_roundtrip():
    b = BoundedReal.exact(Fraction(3, 8))
    assert b.abs_error == 0  # power-of-two denominator is representable
    assert b.lower() == b.upper() == Fraction(3, 8)


def test_mpf_to_fraction_exact():
    with mpmath.workprec(128):
        x = mpmath.mpf(7) / 3
    f = mpf_to_fraction(x)
    # the fraction is exactly the binary value, so converting back is lossless
    with mpmath.workprec(200):
        y = mpmath.mpf(f.numerator) / f.denominator
    assert y == x


def test_interval_arithmetic_contains_truth():
    a = BoundedReal.exact(Fraction(1, 3))
    b = BoundedReal.exact(Fraction(2, 7))
    assert contains(a + b, Fraction(1, 3) + Fraction(2, 7))
    assert contains(a - b, Fraction(1, 3) - Fraction(2, 7))
    assert contains(a * b, Fraction(2, 21))
    assert contains(a / b, Fraction(7, 6))


def test_neg_abs_preserve_precision():
    # regression: unary ops must not round to the ambient 53-bit precision
    x = pow_rational(3, Fraction(1, 2), 128)
    y = -x
    assert abs((-y).value - x.value) == 0
    assert abs(abs(y).value - x.value) == 0
    assert float(y.abs_error) < 1e-35


def test_ln_exp_bounds():
    x = ln_int(2, 128)
    with mpmath.workprec(300):
        truth = mpf_to_fraction(mpmath.log(mpmath.mpf(2)))
    assert x.lower() <= truth <= x.upper()
    back = x.exp()
    assert back.lower() <= 2 <= back.upper()
    with pytest.raises(DomainError):
        ln_int(0)
    with pytest.raises(DomainError):
        ln_fraction(Fraction(0))


def test_pow_rational_matches_mpmath():
    v = pow_rational(5, Fraction(7, 10), 192)
    with mpmath.workprec(300):
        truth = mpmath.power(5, mpmath.mpf(7) / 10)
    assert abs(float(v.value - truth)) <= float(v.abs_error)


def test_three_valued_comparison():
    x = BoundedReal.exact(Fraction(1, 3), 128)
    assert x.lt(Fraction(1, 2)) is True
    assert x.gt(Fraction(1, 2)) is False
    wide = BoundedReal(x.value, mpmath.mpf(1), 128)
    assert wide.cmp(Fraction(1, 2)) is None


def test_refine_escalates_and_gives_up():
    calls = []

    def decide(bits):
        calls.append(bits)
        return True if bits >= 512 else None

    assert refine(decide, 128, name="t") is True
    assert calls == [128, 256, 512]

    with pytest.raises(UndecidableComparison):
        refine(lambda bits: None, 64, name="hopeless")


def test_division_by_zero_interval():
    zeroish = BoundedReal(mpmath.mpf(0), mpmath.mpf(1), 64)
    with pytest.raises(DomainError):
        BoundedReal.exact(1) / zeroish


def test_log_domain_identity():
    # ln(a*b) within bounds of ln a + ln b
    a = pow_rational(7, Fraction(3, 4))
    b = pow_rational(11, Fraction(1, 4))
    lhs = (a * b).log()
    rhs = a.log() + b.log()
    assert lhs.lower() <= rhs.upper() and rhs.lower() <= lhs.upper()


def test_format_and_float():
    x = BoundedReal.exact(Fraction(5, 2))
    assert f"{x:.2f}" == "2.50"
    assert math.isclose(x.midpoint_float(), 2.5)
