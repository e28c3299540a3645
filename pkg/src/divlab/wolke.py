"""Squarefree prime-product sequences approaching a target from below.

Starting from n_0 = prod of the primes in (y, p_0] whose f-product stays
at or under the target a, each step absorbs the smallest prime that keeps
f_s(n) <= a.  The absorbed primes grow roughly quadratically per step
(the threshold is Delta_k = f/(a - f), which squares as the gap shrinks),
so only a short prefix is constructible before the deterministic primality
frontier; ``build`` stops there and records why.  Every step carries its
verdict against the density-strength bound n^-(0.4 s - eps), evaluated in
the log domain because n overflows fixed-width integers within a few steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from .bounded import (
    DEFAULT_BITS,
    MAX_REFINES,
    BoundedReal,
    ln_fraction,
    pow_rational,
    refine,
)
from .density import to_fraction
from .divisor import Exponent, Value
from .errors import (
    DomainError,
    InvariantViolation,
    ResourceLimitError,
    UndecidableComparison,
)
from .primes import (
    Factorization,
    first_prime_at_least,
    next_prime,
    prev_prime,
    shared_table,
)

import math


@dataclass(frozen=True)
class WolkeConfig:
    a: Fraction
    s: Exponent
    eps: Fraction
    y: Fraction = Fraction(2)
    max_steps: int = 10
    prime_cap: int = 10**9

    def __post_init__(self):
        if self.a < 1:
            raise DomainError("target a must be >= 1")
        if not 0 < self.s.fraction <= 1:
            raise DomainError("this construction needs 0 < s <= 1")
        bound_expo = Fraction(2, 5) * self.s.fraction - self.eps
        if self.eps <= 0 or bound_expo <= 0:
            raise DomainError("eps must lie in (0, 0.4*s)")
        if self.y <= 0:
            raise DomainError("y must be positive")
        if self.max_steps < 0:
            raise DomainError("max_steps must be >= 0")

    @classmethod
    def of(cls, a, s, eps, y=2, max_steps: int = 10, prime_cap: int = 10**9):
        return cls(
            a=to_fraction(a), s=Exponent.of(s), eps=to_fraction(eps),
            y=to_fraction(y), max_steps=max_steps, prime_cap=prime_cap,
        )

    @property
    def bound_exponent(self) -> Fraction:
        return Fraction(2, 5) * self.s.fraction - self.eps


@dataclass(frozen=True)
class WolkeStep:
    k: int
    p: int  # prime absorbed at this step; the last initial prime for k = 0
    n: Factorization
    log_n: BoundedReal
    f_value: Value
    gap: Value
    delta: Optional[Value]
    verdict: bool
    prev_prime_logged: Optional[bool]  # f_{k-1} * (1 + pbar^-s) > a, logged
    gap_bound_ok: Optional[bool]  # gap <= 4^s a (p^s - pbar^s)/p^2s, k >= 1


@dataclass
class WolkeSequence:
    config: WolkeConfig
    steps: Tuple[WolkeStep, ...]
    terminated_exact: bool
    stop_reason: str = "running"

    @property
    def last(self) -> WolkeStep:
        return self.steps[-1]


def _f_of_primes(primes, s: Exponent, bits: int) -> Value:
    if s.is_integer:
        prod = Fraction(1)
        for p in primes:
            ps = p**s.numeric
            prod *= Fraction(ps + 1, ps)
        return prod
    prod = BoundedReal.exact(1, bits)
    for p in primes:
        prod = prod * (1 + pow_rational(p, -s.fraction, bits))
    return prod


def initial_n0(config: WolkeConfig, bits: int = DEFAULT_BITS) -> Factorization:
    """Product of the primes in (y, p_0], p_0 maximal with f-product <= a;
    empty (n_0 = 1) when even the first prime above y overshoots."""
    s = config.s
    a = config.a
    primes = []
    start = int(config.y) + 1  # strictly above y
    table = shared_table()
    for p in table.iter_from(max(2, start)):
        if p > config.prime_cap:
            raise ResourceLimitError(f"initial scan passed prime cap {config.prime_cap}")
        trial = primes + [p]
        if s.is_integer:
            fits = _f_of_primes(trial, s, bits) <= a
        else:

            def decide(b: int, trial=trial):
                c = _f_of_primes(trial, s, b).cmp(a)
                return None if c is None else c < 0

            fits = refine(decide, bits, name=f"initial absorb {p}")
        if not fits:
            break
        primes.append(p)
    return Factorization(tuple((p, 1) for p in primes))


def _bounded_positive_gap(primes, s: Exponent, a: Fraction, bits: int):
    """(f, gap, bits) at a precision where gap = a - f excludes zero.

    Irrational f never equals the rational target, so escalation
    terminates; a certified negative gap is an implementation bug.
    """
    b = bits
    for _ in range(MAX_REFINES + 1):
        f = _f_of_primes(primes, s, b)
        g = a - f
        c = g.cmp(0)
        if c == 1:
            return f, g, b
        if c == -1:
            raise InvariantViolation("f exceeded its target")
        b *= 2
    raise UndecidableComparison("gap > 0", b)


def _smallest_absorbable(
    f_primes, s: Exponent, a: Fraction, last: int, cap: int, bits: int
) -> int:
    """Smallest prime p with f * (1 + p^-s) <= a; by construction it
    exceeds every prime already absorbed."""
    if s.is_integer:
        f = _f_of_primes(f_primes, s, bits)
        delta = f / (a - f)
        # fit iff p^s >= delta
        q_min = -(-delta.numerator // delta.denominator)
        q = first_prime_at_least(max(q_min, 2), cap=cap)
        if q <= last:
            raise InvariantViolation("absorbed primes must strictly increase")
        return q
    sf = s.fraction

    def fits(candidate: int):
        def decide(b: int):
            f = _f_of_primes(f_primes, s, b)
            lhs = f * (1 + pow_rational(candidate, -sf, b))
            c = lhs.cmp(a)
            return None if c is None else c < 0

        return refine(decide, bits, name=f"absorb {candidate}")

    f_now, gap_now, gb = _bounded_positive_gap(f_primes, s, a, bits)
    delta = f_now / gap_now
    lo = int(math.floor(math.exp(delta.log().midpoint_float() / float(sf)))) - 2
    q = first_prime_at_least(max(lo, 2), cap=cap)
    tries = 0
    while not fits(q):
        q = next_prime(q, cap=cap)
        tries += 1
        if tries > 200:
            raise InvariantViolation("absorbable-prime walk failed")
    if q <= last:
        raise InvariantViolation("absorbed primes must strictly increase")
    return q


def _certified_le_zero(expr_fn, bits: int, name: str) -> bool:
    def decide(b: int):
        c = expr_fn(b).cmp(0)
        return None if c is None else c < 0

    return refine(decide, bits, name=name)


def _make_step(
    config: WolkeConfig,
    k: int,
    p: int,
    primes: Tuple[int, ...],
    bits: int,
) -> WolkeStep:
    s = config.s
    a = config.a
    n = Factorization(tuple((q, 1) for q in primes))
    log_n = n.log_value(bits)
    if not primes:
        # f(1) = 1 exactly in both arithmetic modes
        f_value: Value = Fraction(1)
        gap: Value = a - 1
    elif s.is_integer:
        f_value = _f_of_primes(primes, s, bits)
        gap = a - f_value
        if gap < 0:
            raise InvariantViolation("f exceeded its target")
    else:
        f_value, gap, _ = _bounded_positive_gap(primes, s, a, bits)

    exact_zero = isinstance(gap, Fraction) and gap == 0
    delta = None if exact_zero else f_value / gap

    if exact_zero:
        verdict = True
    elif not primes:
        # n = 1: the bound is exactly 1 and the gap is exactly a - 1
        verdict = (a - 1) <= 1
    else:
        expo = config.bound_exponent

        def expr(b: int) -> BoundedReal:
            if isinstance(gap, Fraction):
                lg = ln_fraction(gap, b)
            else:
                g = a - _f_of_primes(primes, s, b)
                lg = g.log()
            return lg + BoundedReal.exact(expo, b) * n.log_value(b)

        verdict = _certified_le_zero(expr, bits, "gap <= n^-(0.4s - eps)")

    prev_logged = None
    gap_bound_ok = None
    if k >= 1:
        pbar = prev_prime(p)
        prev_primes = primes[:-1]
        if s.is_integer:
            f_prev = _f_of_primes(prev_primes, s, bits)
            ps = pbar**s.numeric
            prev_logged = f_prev * Fraction(ps + 1, ps) > a
            if not exact_zero:
                pk = p**s.numeric
                rhs = Fraction(4**s.numeric) * a * Fraction(pk - ps, pk * pk)
                gap_bound_ok = gap <= rhs
            else:
                gap_bound_ok = True
        else:
            sf = s.fraction

            def prev_expr(b: int) -> BoundedReal:
                f_prev = _f_of_primes(prev_primes, s, b)
                return a - f_prev * (1 + pow_rational(pbar, -sf, b))

            prev_logged = _certified_le_zero(prev_expr, bits, "predecessor overshoot")

            def w5_expr(b: int) -> BoundedReal:
                g = a - _f_of_primes(primes, s, b)
                ps_b = pow_rational(p, sf, b)
                pbar_b = pow_rational(pbar, sf, b)
                rhs = pow_rational(4, sf, b) * a * (ps_b - pbar_b) / (ps_b * ps_b)
                return g - rhs

            gap_bound_ok = _certified_le_zero(w5_expr, bits, "gap sanity bound")

    return WolkeStep(
        k=k, p=p, n=n, log_n=log_n, f_value=f_value, gap=gap, delta=delta,
        verdict=verdict, prev_prime_logged=prev_logged, gap_bound_ok=gap_bound_ok,
    )


def extend(seq: WolkeSequence, bits: int = DEFAULT_BITS) -> WolkeStep:
    """Absorb the next admissible prime and append the resulting step."""
    if seq.terminated_exact:
        raise DomainError("sequence already hit its target exactly")
    config = seq.config
    last_step = seq.last
    primes = last_step.n.primes()
    q = _smallest_absorbable(
        primes, config.s, config.a, last_step.p, config.prime_cap, bits
    )
    new_primes = primes + (q,)
    step = _make_step(config, last_step.k + 1, q, new_primes, bits)
    seq.steps = seq.steps + (step,)
    if isinstance(step.gap, Fraction) and step.gap == 0:
        seq.terminated_exact = True
        seq.stop_reason = "exact_hit"
    return step


def build(config: WolkeConfig, bits: int = DEFAULT_BITS) -> WolkeSequence:
    """Run the construction for up to max_steps extensions.

    Termination is threefold and all three are normal outcomes: the step
    budget, an exact hit, or the resource frontier (the next prime would
    exceed the cap or the deterministic primality range).
    """
    n0 = initial_n0(config, bits)
    p0 = n0.primes()[-1] if n0.factors else 0
    first = _make_step(config, 0, p0, n0.primes(), bits)
    seq = WolkeSequence(
        config=config,
        steps=(first,),
        terminated_exact=isinstance(first.gap, Fraction) and first.gap == 0,
        stop_reason="exact_hit" if (isinstance(first.gap, Fraction) and first.gap == 0) else "running",
    )
    while not seq.terminated_exact and seq.last.k < config.max_steps:
        try:
            extend(seq, bits)
        except ResourceLimitError:
            seq.stop_reason = "prime_cap"
            return seq
    if seq.stop_reason == "running":
        seq.stop_reason = "max_steps"
    return seq
