"""Certified zeta evaluation and empirical moments of f_s over 1..N.

The moment scan uses the divisor-pairing identity f_s(n) = sum_{d|n} d^-s:
for every d <= N it adds d^-s to all multiples of d, so the whole table
costs O(N log N).  Accumulation is double-precision with an explicitly
tracked (conservative) error bound; exact rational accumulation is available
for small N.  zeta(t) is a truncated series plus an integral tail bracket
whose half-width is certified into the error bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from .bounded import DEFAULT_BITS, BoundedReal, mpf_to_fraction
from .divisor import Exponent
from .errors import DomainError, ResourceLimitError

_ZETA_FLOAT_TERMS = 3 * 10**7
_ZETA_MP_TERMS = 2 * 10**6


def zeta(t, precision: float = 1e-9, bits: int = DEFAULT_BITS) -> BoundedReal:
    """zeta(t) for t > 1 with abs_error <= precision.

    Value = sum_{k<=M} k^-t plus the midpoint of the integral bracket
    [int_{M+1}^inf, int_M^inf] x^-t dx for the tail; the half-width of the
    bracket (<= M^-t / 2) plus summation rounding goes into abs_error.
    """
    t = Exponent.of(t).fraction
    if t <= 1:
        raise DomainError("zeta needs t > 1")
    if precision <= 0:
        raise DomainError("precision must be positive")
    tf = float(t)
    m_needed = int(math.ceil((2.0 / precision) ** (1.0 / tf))) + 1

    if m_needed <= _ZETA_FLOAT_TERMS and precision >= 1e-13:
        ks = np.arange(1, m_needed + 1, dtype=np.float64)
        terms = ks ** (-tf)
        partial = float(np.sum(terms))
        # per-term pow error ~2^-51 rel, pairwise-sum error ~log2(M) ulps
        rounding = partial * (2.0 ** -50 + (math.log2(m_needed) + 2) * 2.0 ** -52)
        partial_err = Fraction(rounding)
        partial_frac = Fraction(partial)
    elif m_needed <= _ZETA_MP_TERMS:
        with mpmath.workprec(bits):
            acc = mpmath.mpf(0)
            texp = mpmath.mpf(t.numerator) / t.denominator
            for k in range(1, m_needed + 1):
                acc += mpmath.power(k, -texp)
            partial_frac = mpf_to_fraction(acc)
            partial_err = partial_frac * Fraction(2) ** (8 - bits) * m_needed
    else:
        raise ResourceLimitError(
            f"zeta({float(t)}) at precision {precision} needs {m_needed} terms"
        )

    with mpmath.workprec(max(bits, 64)):
        texp = mpmath.mpf(t.numerator) / t.denominator
        upper = mpmath.power(m_needed, 1 - texp) / (texp - 1)
        lower = mpmath.power(m_needed + 1, 1 - texp) / (texp - 1)
        tail_mid = mpf_to_fraction((upper + lower) / 2)
        tail_half = mpf_to_fraction((upper - lower) / 2) + abs(tail_mid) * Fraction(2) ** (4 - bits)

    total = BoundedReal.exact(partial_frac + tail_mid, bits)
    err = BoundedReal.exact(partial_err + tail_half + abs(total.lower()) * Fraction(2) ** (4 - bits), bits)
    out = BoundedReal(total.value, err.value + err.abs_error + total.abs_error, bits)
    if not mpf_to_fraction(out.abs_error) <= Fraction(str(precision)):
        raise ResourceLimitError("zeta error budget not met")  # pragma: no cover
    return out


def f_values(N: int, s, scan_cap: int = 10**8) -> np.ndarray:
    """Array v with v[n-1] = f_s(n) in doubles, built by the divisor sieve."""
    if N < 1:
        raise DomainError("N must be >= 1")
    if N > scan_cap:
        raise ResourceLimitError(f"N={N} exceeds scan cap {scan_cap}")
    sf = float(Exponent.of(s).fraction)
    vals = np.zeros(N + 1)
    inv = np.arange(N + 1, dtype=np.float64)
    with np.errstate(divide="ignore"):
        inv = inv**-sf
    for d in range(1, N + 1):
        vals[d::d] += inv[d]
    return vals[1:]


def sigma_values(N: int, s: int, scan_cap: int = 10**8) -> np.ndarray:
    """Exact sigma_s table (int64) for integer s; a[n-1] = sigma_s(n)."""
    if not isinstance(s, int) or s < 0:
        raise DomainError("sigma_values needs integer s >= 0")
    if N < 1:
        raise DomainError("N must be >= 1")
    if N > scan_cap:
        raise ResourceLimitError(f"N={N} exceeds scan cap {scan_cap}")
    # sigma_s(n) <= n^s * (H_n for s=1, zeta(s) <= 2 otherwise)
    headroom = 64 if s <= 1 else 2
    if s > 0 and N**s * headroom >= 2**63:
        raise ResourceLimitError("sigma table would overflow 64-bit integers")
    arr = np.zeros(N + 1, dtype=np.int64)
    powers = np.arange(N + 1, dtype=np.int64) ** s
    for d in range(1, N + 1):
        arr[d::d] += powers[d]
    return arr[1:]


@dataclass(frozen=True)
class MomentReport:
    N: int
    s: Exponent
    mean: BoundedReal
    second_moment: BoundedReal
    variance: BoundedReal
    zeta_ref: BoundedReal
    deviation: BoundedReal
    exact_mean: Optional[Fraction] = None
    exact_second: Optional[Fraction] = None


#: conservative relative slack for the double-precision sieve accumulation
#: (max divisor count, power evaluation and summation rounding combined)
_SIEVE_REL_ERR = Fraction(1, 10**12)


def moment_scan(
    N: int,
    s,
    precision: float = 1e-9,
    scan_cap: int = 10**8,
    exact: bool = False,
    bits: int = DEFAULT_BITS,
) -> MomentReport:
    """Mean, second moment and variance of f_s over 1..N, with zeta(s+1)
    as the reference expectation.

    ``exact=True`` (N <= 10^4, integer s) switches to rational accumulation
    and reports the exact mean alongside.
    """
    s = Exponent.of(s)
    if s.fraction <= 0:
        raise DomainError("moment_scan needs s > 0")
    exact_mean = exact_second = None
    if exact:
        if not s.is_integer or N > 10**4:
            raise DomainError("exact accumulation needs integer s and N <= 10^4")
        acc = [Fraction(0)] * (N + 1)
        for d in range(1, N + 1):
            c = Fraction(1, d**s.numeric)
            for m in range(d, N + 1, d):
                acc[m] += c
        exact_mean = sum(acc[1:], Fraction(0)) / N
        exact_second = sum((v * v for v in acc[1:]), Fraction(0)) / N
        mean = BoundedReal.exact(exact_mean, bits)
        second = BoundedReal.exact(exact_second, bits)
    else:
        vals = f_values(N, s, scan_cap)
        mean_f = math.fsum(vals) / N
        second_f = math.fsum(vals * vals) / N
        mean = _with_rel_err(mean_f, _SIEVE_REL_ERR, bits)
        second = _with_rel_err(second_f, 3 * _SIEVE_REL_ERR, bits)
    variance = second - mean * mean
    zref = zeta(s.fraction + 1, precision=precision, bits=bits)
    deviation = abs(mean - zref)
    return MomentReport(
        N=N, s=s, mean=mean, second_moment=second, variance=variance,
        zeta_ref=zref, deviation=deviation,
        exact_mean=exact_mean, exact_second=exact_second,
    )


def _with_rel_err(x: float, rel: Fraction, bits: int) -> BoundedReal:
    v = BoundedReal.exact(Fraction(x), bits)
    err = abs(Fraction(x)) * rel
    return BoundedReal(v.value, v.abs_error + BoundedReal.exact(err, bits).value, bits)


def expectation_curve(
    s_values: Sequence,
    N: int,
    precision: float = 1e-9,
    scan_cap: int = 10**8,
    bits: int = DEFAULT_BITS,
) -> List[Tuple[Exponent, BoundedReal, BoundedReal, BoundedReal]]:
    """One (s, mean, zeta(s+1), deviation) row per requested s."""
    rows = []
    for s in s_values:
        rep = moment_scan(N, s, precision=precision, scan_cap=scan_cap, bits=bits)
        rows.append((rep.s, rep.mean, rep.zeta_ref, rep.deviation))
    return rows


def variance_report(
    N: int,
    s_values: Sequence,
    scan_cap: int = 10**8,
    bits: int = DEFAULT_BITS,
) -> List[Tuple[Exponent, BoundedReal]]:
    rows = []
    for s in s_values:
        rep = moment_scan(N, s, scan_cap=scan_cap, bits=bits)
        rows.append((rep.s, rep.variance))
    return rows


def running_mean(N: int, s, points: int = 400, scan_cap: int = 10**8):
    """(n, mean up to n) samples for plotting the law-of-large-numbers run."""
    vals = f_values(N, s, scan_cap)
    csum = np.cumsum(vals)
    idx = np.unique(np.linspace(1, N, min(points, N)).astype(np.int64))
    return idx, csum[idx - 1] / idx
