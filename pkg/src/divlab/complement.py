"""Certified values outside the range of f_s, and a bounded membership oracle.

Two certificate families (integer s only; fractional s makes every rational
trivially absent from the range and is rejected at this module's boundary):

* simple: 1 + 1/n^s with n composite is never attained, because any witness
  would have to be divisible by n and then its f-value strictly exceeds
  1 + 1/n^s;
* shifted: (1 + 1/n^s) * f_s(N) with n composite and coprime to N inherits
  the same obstruction.

``membership_scan`` is the brute-force oracle: it searches every admissible
m <= bound (only multiples of rad(denominator) can work) with exact integer
arithmetic and reports a witness or a certified not-found-up-to-bound.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

import numpy as np

from .config import DEFAULT_CAPS, Caps
from .density import approximate, to_fraction
from .divisor import f_s
from .errors import DomainError, ResourceLimitError
from .primes import Factorization, factorize, next_prime
from . import stats


@dataclass(frozen=True)
class ExcludedValue:
    """A rational proven absent from the range, with its certificate."""

    value: Fraction
    kind: str  # "simple" | "shifted"
    n: int
    s: int
    shift_base: Optional[Factorization] = None  # the N of a shifted value


@dataclass(frozen=True)
class MembershipVerdict:
    query: Fraction
    outcome: str  # "in_range" | "not_found_up_to" | "provably_excluded"
    witness: Optional[int] = None
    bound: Optional[int] = None
    certificate: Optional[ExcludedValue] = None


def _require_integer_s(s) -> int:
    if isinstance(s, Fraction):
        if s.denominator != 1:
            raise DomainError("complement certificates exist for integer s only")
        s = int(s)
    if not isinstance(s, int) or s < 1:
        raise DomainError("complement certificates need integer s >= 1")
    return s


def _require_composite(n: int) -> None:
    fact = factorize(n)
    if n < 4 or (len(fact.factors) == 1 and fact.factors[0][1] == 1):
        raise DomainError(f"{n} is not composite")


def excluded_simple(n: int, s) -> ExcludedValue:
    """1 + 1/n^s for composite n: certified outside the range."""
    s = _require_integer_s(s)
    _require_composite(n)
    ns = n**s
    return ExcludedValue(value=Fraction(ns + 1, ns), kind="simple", n=n, s=s)


def excluded_shifted(n: int, N: Factorization, s) -> ExcludedValue:
    """(1 + 1/n^s) * f_s(N) for composite n coprime to N."""
    s = _require_integer_s(s)
    _require_composite(n)
    if not N.coprime_to(n):
        raise DomainError(f"{n} shares a prime factor with {N}")
    ns = n**s
    value = Fraction(ns + 1, ns) * f_s(N, s)
    return ExcludedValue(value=value, kind="shifted", n=n, s=s, shift_base=N)


def complement_point(
    lo, hi, s, caps: Caps = DEFAULT_CAPS
) -> ExcludedValue:
    """A certified excluded rational strictly inside (lo, hi).

    Picks a range point x0 = f_s(N) inside the interval (density solver for
    s = 1, direct scan for s >= 2), then shifts it by (1 + 1/n^s) with
    n the square of the smallest prime outside N that keeps the product
    below hi.
    """
    s = _require_integer_s(s)
    lo, hi = to_fraction(lo), to_fraction(hi)
    if not 1 <= lo < hi:
        raise DomainError("need 1 <= lo < hi")

    if s == 1:
        mid = (lo + hi) / 2
        sol = approximate(mid, 1, (hi - lo) / 4, caps)
        N = sol.n
        x0 = sol.value
    else:
        N, x0 = _range_point_scan(lo, hi, s, caps)

    # n = r^2: the cheapest certified-composite family coprime to N
    threshold = x0 / (hi - x0)  # need n^s > threshold
    r = 2
    while True:
        n = r * r
        if not N.divides_value(r) and Fraction(n) ** s > threshold:
            break
        r = next_prime(r, cap=caps.prime_cap)
    out = excluded_shifted(n, N, s)
    if not lo < out.value < hi:
        raise DomainError("interval too tight for a certified point")
    return out


def _range_point_scan(lo: Fraction, hi: Fraction, s: int, caps: Caps):
    """Scan m = 1, 2, ... for f_s(m) in (lo, hi), exact comparisons."""
    chunk = 1 << 16
    start = 1
    while start <= caps.scan_cap:
        stop = min(start + chunk - 1, caps.scan_cap)
        sig = stats.sigma_values(stop, s, scan_cap=caps.scan_cap)[start - 1 :]
        for i, m in enumerate(range(start, stop + 1)):
            ms = m**s
            sv = int(sig[i])
            if lo * ms < sv < hi * ms:
                return factorize(m), Fraction(sv, ms)
        start = stop + 1
    raise ResourceLimitError(
        f"no range point found in ({lo}, {hi}) for s={s} below {caps.scan_cap}"
    )


@lru_cache(maxsize=4)
def _sigma_table(N: int, s: int) -> np.ndarray:
    return stats.sigma_values(N, s, scan_cap=10**8)


def membership_scan(
    q,
    s,
    bound: int,
    threads: int = 1,
    scan_cap: int = 10**8,
) -> MembershipVerdict:
    """Exhaustive search for m <= bound with f_s(m) = q, exact arithmetic.

    f_s(m) = u/v in lowest terms forces v | m^s, so only multiples of the
    radical of v are tested.  Not finding a witness is a valid outcome.
    """
    s = _require_integer_s(s)
    q = to_fraction(q)
    if q < 1:
        raise DomainError("range values are >= 1")
    if bound < 1:
        raise DomainError("bound must be >= 1")
    if bound > scan_cap:
        raise ResourceLimitError(f"bound {bound} exceeds scan cap {scan_cap}")
    u, v = q.numerator, q.denominator
    rad = 1
    for p, _ in factorize(v).factors:
        rad *= p
    if rad > bound:
        return MembershipVerdict(query=q, outcome="not_found_up_to", bound=bound)

    if bound // rad <= 512:
        # few candidates: factor them directly instead of sieving a table
        from .divisor import sigma_s

        for m in range(rad, bound + 1, rad):
            if sigma_s(factorize(m), s) * v == u * m**s:
                return MembershipVerdict(query=q, outcome="in_range", witness=m)
        return MembershipVerdict(query=q, outcome="not_found_up_to", bound=bound)

    sig = _sigma_table(bound, s)
    candidates = np.arange(rad, bound + 1, rad, dtype=np.int64)

    # overflow guard for the vectorized int64 compare
    vector_ok = v * int(sig.max()) < 2**62 and u * bound**s < 2**62

    def scan_chunk(chunk: np.ndarray) -> Optional[int]:
        if vector_ok:
            hits = chunk[sig[chunk - 1] * v == u * chunk**s]
            return int(hits[0]) if len(hits) else None
        for m in chunk.tolist():
            if int(sig[m - 1]) * v == u * m**s:
                return m
        return None

    if threads <= 1 or len(candidates) < 4096:
        found = scan_chunk(candidates)
    else:
        parts = np.array_split(candidates, threads * 4)
        found = None
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for res in pool.map(scan_chunk, parts):
                if res is not None:
                    found = res if found is None else min(found, res)
        # parts are ascending, but keep the reduction order-independent
    if found is not None:
        # confirm with an independent exact evaluation before reporting
        if f_s(factorize(found), s) != q:
            raise DomainError("scan produced a false witness")  # pragma: no cover
        return MembershipVerdict(query=q, outcome="in_range", witness=found)
    return MembershipVerdict(query=q, outcome="not_found_up_to", bound=bound)


def _perfect_root(v: int, s: int) -> Optional[int]:
    """Integer n with n^s = v, if one exists."""
    if v < 1:
        return None
    n = round(v ** (1.0 / s))
    for cand in (n - 1, n, n + 1):
        if cand >= 1 and cand**s == v:
            return cand
    return None


def verdict(q, s, bound: int, threads: int = 1, scan_cap: int = 10**8) -> MembershipVerdict:
    """Certificate-aware membership report used by the CLI.

    Values of the shape 1 + 1/n^s are decided instantly: prime n is its own
    witness, composite n is provably excluded.  Everything else falls back
    to the bounded scan.
    """
    s = _require_integer_s(s)
    q = to_fraction(q)
    if q < 1:
        raise DomainError("range values are >= 1")
    u, v = q.numerator, q.denominator
    if u - v == 1:
        n = _perfect_root(v, s)
        if n is not None and n >= 2:
            fact = factorize(n)
            if len(fact.factors) == 1 and fact.factors[0][1] == 1:
                return MembershipVerdict(query=q, outcome="in_range", witness=n)
            return MembershipVerdict(
                query=q,
                outcome="provably_excluded",
                certificate=ExcludedValue(value=q, kind="simple", n=n, s=s),
            )
    return membership_scan(q, s, bound, threads=threads, scan_cap=scan_cap)
