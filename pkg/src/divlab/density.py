"""Global density machinery for 0 < s <= 1, plus rupture diagnostics for s > 1.

``greedy_select`` realizes the skip-ahead greedy: extend the product
Q = prod(1 + 1/(q^s - 1)) with consecutive primes while it stays <= a, skip
forward to the smallest fitting prime on overshoot, stop once Q lands in
(a - eps, a].  ``choose_exponents`` then picks prime-power exponents whose
exact product lands in (Q - eps, Q).  ``approximate`` combines both with an
eps/2 + eps/2 split, yielding a factored witness with |f_s(n) - a| < eps.

For s > 1 the range is bounded by zeta(s); ``rupture_report`` classifies a
target as provably unreachable (only via the zeta bound, which is sound) or
feasible-with-diagnostics.  A stalled greedy prefix times a tail bound is
reported as a diagnostic but never used as an unreachability proof: finite
prime powers have smaller factors than the limit factors the greedy uses, so
a target skipped by the greedy can still be attained (f_2(10) = 13/10 while
the greedy for 1.3 must skip the prime 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np

from .bounded import (
    DEFAULT_BITS,
    BoundedReal,
    pow_rational,
    refine,
)
from .config import DEFAULT_CAPS, Caps
from .divisor import Exponent, Value, f_prime_power, f_s
from .errors import DomainError, InvariantViolation, ResourceLimitError
from .primes import (
    Factorization,
    first_prime_at_least,
    next_prime,
    shared_table,
)
from . import stats


def to_fraction(x) -> Fraction:
    """Decimal-literal semantics: floats go through their str form."""
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


def _validate_s_unit(s: Exponent) -> None:
    if not 0 < s.fraction <= 1:
        raise DomainError("this solver needs 0 < s <= 1")


def _q_factor_exact(q: int, s_int: int) -> Fraction:
    qs = q**s_int
    return Fraction(qs, qs - 1)


def _q_product_bounded(primes, s: Fraction, bits: int) -> BoundedReal:
    prod = BoundedReal.exact(1, bits)
    for q in primes:
        qs = pow_rational(q, s, bits)
        prod = prod * (1 + 1 / (qs - 1))
    return prod


@dataclass(frozen=True)
class GreedySelection:
    """Ascending primes whose limit-factor product Q sits in (a - eps, a]."""

    primes: Tuple[int, ...]
    s: Exponent
    target: Fraction
    eps: Fraction
    q_product: Value
    exact_hit: bool

    @property
    def slack(self) -> Value:
        return self.target - self.q_product

    def q_product_at(self, bits: int) -> BoundedReal:
        return _q_product_bounded(self.primes, self.s.fraction, bits)


@dataclass(frozen=True)
class ApproxSolution:
    n: Factorization
    value: Value
    target: Fraction
    eps: Fraction
    achieved_error: Value
    selection: GreedySelection
    exponents: Dict[int, int]


def greedy_select(
    a,
    s,
    eps,
    caps: Caps = DEFAULT_CAPS,
    bits: int = DEFAULT_BITS,
) -> GreedySelection:
    """Skip-ahead greedy prime selection.

    Strict comparisons on the irrational path are certified with escalating
    precision; on the exact path Q may hit a exactly, which short-circuits
    as an exact hit.
    """
    a = to_fraction(a)
    eps = to_fraction(eps)
    s = Exponent.of(s)
    _validate_s_unit(s)
    if a <= 1:
        raise DomainError("greedy_select needs a > 1")
    if eps <= 0:
        raise DomainError("eps must be positive")

    if s.is_integer:
        return _greedy_exact(a, eps, caps)
    return _greedy_bounded(a, s, eps, caps, bits)


def _greedy_exact(a: Fraction, eps: Fraction, caps: Caps) -> GreedySelection:
    s = Exponent.of(1)
    primes = []
    q_prod = Fraction(1)
    last = 1
    while q_prod < a - eps:
        # fitting primes are exactly those with q >= 1 + Q/(a - Q)
        threshold = 1 + q_prod / (a - q_prod)
        q_min = -(-threshold.numerator // threshold.denominator)
        q = first_prime_at_least(max(q_min, last + 1), cap=caps.prime_cap)
        q_prod *= _q_factor_exact(q, 1)
        primes.append(q)
        last = q
        if q_prod == a:
            return GreedySelection(
                primes=tuple(primes), s=s, target=a, eps=eps,
                q_product=q_prod, exact_hit=True,
            )
    if not q_prod <= a:
        raise InvariantViolation("greedy product exceeded its target")
    return GreedySelection(
        primes=tuple(primes), s=s, target=a, eps=eps,
        q_product=q_prod, exact_hit=False,
    )


def _greedy_bounded(
    a: Fraction, s: Exponent, eps: Fraction, caps: Caps, bits: int
) -> GreedySelection:
    sf = s.fraction
    primes: list = []
    last = 1

    def product_at(b: int) -> BoundedReal:
        return _q_product_bounded(primes, sf, b)

    def stopped(b: int) -> Optional[bool]:
        return product_at(b).gt(a - eps)

    def fits(candidate: int):
        trial = primes + [candidate]

        def decide(b: int) -> Optional[bool]:
            c = _q_product_bounded(trial, sf, b).cmp(a)
            return None if c is None else c < 0

        return refine(decide, bits, name=f"greedy fit of prime {candidate}")

    while not refine(stopped, bits, name="greedy stop Q > a - eps"):
        # threshold: candidate fits iff q^s >= 1 + Q/(a - Q)
        q_here = product_at(bits)
        threshold = (1 + q_here / (a - q_here)).log() / BoundedReal.exact(sf, bits)
        lo = int(math.floor(math.exp(threshold.midpoint_float()) - 2))
        q = first_prime_at_least(max(lo, last + 1, 2), cap=caps.prime_cap)
        tries = 0
        while not fits(q):
            q = next_prime(q, cap=caps.prime_cap)
            tries += 1
            if tries > 200:
                raise InvariantViolation(
                    "greedy candidate walk failed to find a fitting prime"
                )
        primes.append(q)
        last = q
    return GreedySelection(
        primes=tuple(primes), s=s, target=a, eps=eps,
        q_product=product_at(bits), exact_hit=False,
    )


def choose_exponents(
    sel: GreedySelection,
    eps,
    caps: Caps = DEFAULT_CAPS,
    bits: int = DEFAULT_BITS,
) -> Dict[int, int]:
    """Exponents k_i with Q - eps < prod f_s(q_i^k_i) < Q.

    Starts at k_i = 1 everywhere and raises the exponent with the largest
    remaining deficit until the product clears Q - eps; each increment
    shrinks that prime's deficit by a factor q^-s, so termination is
    geometric.
    """
    eps = to_fraction(eps)
    if eps <= 0:
        raise DomainError("eps must be positive")
    if not sel.primes:
        return {}
    exps = {q: 1 for q in sel.primes}
    s = sel.s

    if s.is_integer:
        si = s.numeric
        f_now = {q: f_prime_power(q, 1, s) for q in sel.primes}
        product = Fraction(1)
        for q in sel.primes:
            product *= f_now[q]
        target = sel.q_product - eps
        while not product > target:
            q = _largest_deficit_prime(exps, si)
            if exps[q] + 1 > caps.exponent_cap:
                raise ResourceLimitError(
                    f"exponent cap {caps.exponent_cap} hit at prime {q}"
                )
            exps[q] += 1
            new_f = f_prime_power(q, exps[q], s)
            product *= new_f / f_now[q]
            f_now[q] = new_f
        return dict(sorted(exps.items()))

    sf = s.fraction

    def cleared(b: int) -> Optional[bool]:
        prod = BoundedReal.exact(1, b)
        for q in sel.primes:
            prod = prod * f_prime_power(q, exps[q], s, b)
        margin = prod - sel.q_product_at(b) + eps
        return margin.gt(0)

    while not refine(cleared, bits, name="exponent product > Q - eps"):
        q = _largest_deficit_prime(exps, float(sf))
        if exps[q] + 1 > caps.exponent_cap:
            raise ResourceLimitError(
                f"exponent cap {caps.exponent_cap} hit at prime {q}"
            )
        exps[q] += 1
    return dict(sorted(exps.items()))


def _largest_deficit_prime(exps: Dict[int, int], s) -> int:
    # deficit of q at exponent k is q^{-ks}/(q^s - 1); floats suffice to
    # pick the maximum, exact arithmetic guards the stopping test
    best_q, best_d = None, -1.0
    for q, k in exps.items():
        d = q ** (-k * float(s)) / (q ** float(s) - 1.0)
        if d > best_d or (d == best_d and best_q is not None and q < best_q):
            best_q, best_d = q, d
    return best_q


def approximate(
    a,
    s,
    eps,
    caps: Caps = DEFAULT_CAPS,
    bits: int = DEFAULT_BITS,
) -> ApproxSolution:
    """Factored witness n with |f_s(n) - a| < eps, for a >= 1, 0 < s <= 1.

    The eps budget is split evenly between prime selection and exponent
    selection.  The returned witness is the first one found, not a minimal
    one.  s > 1 is rejected; use rupture_report for that regime.
    """
    a = to_fraction(a)
    eps = to_fraction(eps)
    s = Exponent.of(s)
    if s.fraction > 1:
        raise DomainError("density holds only for s <= 1; use rupture_report")
    _validate_s_unit(s)
    if a < 1:
        raise DomainError("approximate needs a >= 1")
    if eps <= 0:
        raise DomainError("eps must be positive")

    if a == 1:
        return _approximate_one(s, eps, caps, bits)

    sel = greedy_select(a, s, eps / 2, caps, bits)
    exps = choose_exponents(sel, eps / 2, caps, bits)
    n = Factorization(tuple(sorted(exps.items())))
    value = f_s(n, s, bits)
    if s.is_integer:
        err: Value = abs(a - value)
        if not err < eps:
            raise InvariantViolation("witness missed its error budget")
    else:

        def certified(b: int) -> Optional[bool]:
            v = f_s(n, s, b)
            return abs(v - a).lt(eps)

        if not refine(certified, bits, name="|f_s(n) - a| < eps"):
            raise InvariantViolation("witness missed its error budget")
        err = abs(value - a)
    return ApproxSolution(
        n=n, value=value, target=a, eps=eps, achieved_error=err,
        selection=sel, exponents=exps,
    )


def _approximate_one(
    s: Exponent, eps: Fraction, caps: Caps, bits: int
) -> ApproxSolution:
    # a = 1: any prime p with p^-s < eps witnesses, f_s(p) = 1 + p^-s
    if s.is_integer:
        bound = 1 / eps
        p = first_prime_at_least(
            int(bound) + 1, cap=caps.prime_cap
        )
        err: Value = Fraction(1, p)
    else:
        est = float(1 / eps) ** (1 / float(s))
        p = first_prime_at_least(max(2, int(est)), cap=caps.prime_cap)
        while True:

            def small_enough(b: int, prime=p) -> Optional[bool]:
                return pow_rational(prime, -s.fraction, b).lt(eps)

            if refine(small_enough, bits, name="p^-s < eps"):
                break
            p = next_prime(p, cap=caps.prime_cap)
        err = pow_rational(p, -s.fraction, bits)
    n = Factorization(((p, 1),))
    sel = GreedySelection(
        primes=(), s=s, target=Fraction(1), eps=eps,
        q_product=Fraction(1), exact_hit=False,
    )
    return ApproxSolution(
        n=n, value=f_s(n, s, bits), target=Fraction(1), eps=eps,
        achieved_error=err, selection=sel, exponents={p: 1},
    )


# -- s > 1: bounds and rupture diagnostics -------------------------------


def range_upper_bound(s, precision: float = 1e-12, bits: int = DEFAULT_BITS) -> BoundedReal:
    """zeta(s), the strict upper bound of the range for s > 1."""
    s = Exponent.of(s)
    if not s.fraction > 1:
        raise DomainError("range_upper_bound needs s > 1")
    return stats.zeta(s.fraction, precision=precision, bits=bits)


def tail_product_bound(
    q_start: int, s, precision: float = 1e-9, bits: int = DEFAULT_BITS
) -> BoundedReal:
    """Certified upper bound on prod_{p >= q_start} (1 + 1/(p^s - 1)).

    Uses log(1+x) <= x, a finite prime sum, and an integral bound on the
    integer tail.  The returned BoundedReal's upper() is the one-sided
    certificate; the true product is always <= it.
    """
    s = Exponent.of(s)
    sf = float(s.fraction)
    if not s.fraction > 1:
        raise DomainError("tail_product_bound needs s > 1")
    if q_start < 2:
        q_start = 2
    table = shared_table()
    x_cut = max(2 * q_start, 10**4)
    while True:
        tail = (x_cut ** (1.0 - sf) / (sf - 1.0)) / (1.0 - x_cut ** (-sf))
        if tail <= precision / 2 or x_cut >= 4 * 10**6:
            break
        x_cut *= 4
    table.extend_to(max(table.limit, x_cut))
    ps = table.primes
    ps = ps[(ps >= q_start) & (ps <= x_cut)].astype(np.float64)
    if len(ps):
        terms = 1.0 / (ps**sf - 1.0)
        finite = float(np.sum(terms))
    else:
        finite = 0.0
    # inflate the float sum far beyond its accumulated rounding error
    log_upper = finite * (1.0 + 1e-9) + 1e-300 + tail
    b = BoundedReal.exact(Fraction(log_upper), bits).exp()
    return b


@dataclass(frozen=True)
class RuptureReport:
    """Three-outcome diagnostic for a target above 1 at some s > 1.

    kind 'provably_unreachable' is certified by the zeta(s) upper bound.
    kind 'feasible' decides nothing; it carries the best greedy product
    reached and, when the greedy stalled, the ceiling of that particular
    prefix (diagnostic only: other factorizations may still do better).
    """

    kind: str
    target: Fraction
    s: Exponent
    zeta_bound: BoundedReal
    best_q: Optional[Value] = None
    primes: Tuple[int, ...] = ()
    greedy_ceiling: Optional[Fraction] = None
    greedy_prefix_capped: Optional[bool] = None


def rupture_report(
    a,
    s,
    caps: Caps = DEFAULT_CAPS,
    bits: int = DEFAULT_BITS,
    stall_slack: Fraction = Fraction(1, 10**9),
    max_primes: int = 512,
) -> RuptureReport:
    a = to_fraction(a)
    s = Exponent.of(s)
    if not s.fraction > 1:
        raise DomainError("rupture_report needs s > 1")
    if a < 1:
        raise DomainError("rupture_report needs a >= 1")

    precision = 1e-9
    zeta_bound = stats.zeta(s.fraction, precision=precision, bits=bits)
    for _ in range(4):
        if a >= zeta_bound.upper():
            return RuptureReport(
                kind="provably_unreachable", target=a, s=s,
                zeta_bound=zeta_bound,
            )
        if a <= zeta_bound.lower():
            break
        precision /= 100
        zeta_bound = stats.zeta(s.fraction, precision=precision, bits=bits * 2)
    else:
        raise ResourceLimitError(
            "target indistinguishable from zeta(s) at available precision"
        )

    best_q, primes = _diagnostic_greedy(a, s, caps, bits, stall_slack, max_primes)
    ceiling = None
    capped = None
    if primes:
        tail = tail_product_bound(next_prime(primes[-1]), s, bits=bits)
        q_upper = best_q if isinstance(best_q, Fraction) else best_q.upper()
        ceiling = q_upper * tail.upper()
        capped = ceiling < a
    return RuptureReport(
        kind="feasible", target=a, s=s, zeta_bound=zeta_bound,
        best_q=best_q, primes=tuple(primes),
        greedy_ceiling=ceiling, greedy_prefix_capped=capped,
    )


def _diagnostic_greedy(
    a: Fraction, s: Exponent, caps: Caps, bits: int,
    stall_slack: Fraction, max_primes: int,
):
    """Skip-ahead greedy run for s > 1, stopping on close approach, prime
    cap, or prefix-length cap.  Exact for integer s."""
    if s.is_integer:
        si = s.numeric
        primes = []
        q_prod = Fraction(1)
        last = 1
        while q_prod < a - stall_slack and len(primes) < max_primes:
            threshold = 1 + q_prod / (a - q_prod)
            # fitting primes: q^s >= threshold
            q_min = _int_root_ceil(threshold, si)
            try:
                q = first_prime_at_least(max(q_min, last + 1), cap=caps.prime_cap)
            except ResourceLimitError:
                break
            new = q_prod * _q_factor_exact(q, si)
            if new > a:
                break
            q_prod = new
            primes.append(q)
            last = q
            if q_prod == a:
                break
        return q_prod, primes

    sf = s.fraction
    primes = []
    last = 1
    while len(primes) < max_primes:
        prod = _q_product_bounded(primes, sf, bits)
        close = prod.gt(a - stall_slack)
        if close:
            break
        threshold = (1 + prod / (a - prod)).log() / BoundedReal.exact(sf, bits)
        lo = int(math.floor(math.exp(threshold.midpoint_float()) - 2))
        try:
            q = first_prime_at_least(max(lo, last + 1, 2), cap=caps.prime_cap)
        except ResourceLimitError:
            break

        def fits(candidate: int):
            trial = primes + [candidate]

            def decide(b: int) -> Optional[bool]:
                c = _q_product_bounded(trial, sf, b).cmp(a)
                return None if c is None else c < 0

            return refine(decide, bits, name=f"diagnostic fit of {candidate}")

        tries = 0
        found = True
        while not fits(q):
            try:
                q = next_prime(q, cap=caps.prime_cap)
            except ResourceLimitError:
                found = False
                break
            tries += 1
            if tries > 200:
                found = False
                break
        if not found:
            break
        primes.append(q)
        last = q
    return _q_product_bounded(primes, sf, bits), primes


def _int_root_ceil(x: Fraction, k: int) -> int:
    """Smallest integer r with r**k >= x."""
    if x <= 1:
        return 1
    r = int(round(float(x) ** (1.0 / k)))
    while Fraction(r) ** k >= x:
        r -= 1
    while Fraction(r) ** k < x:
        r += 1
    return r


def divergence_partial_product(limit: int, s=1, bits: int = DEFAULT_BITS) -> float:
    """Partial product prod_{p <= limit} (1 + 1/(p^s - 1)) in floats; the
    divergence witness for s <= 1 used by tests and the CLI."""
    s = Exponent.of(s)
    table = shared_table()
    table.extend_to(limit)
    ps = table.primes
    ps = ps[ps <= limit].astype(np.float64)
    return float(np.prod(1.0 + 1.0 / (ps ** float(s.fraction) - 1.0)))
