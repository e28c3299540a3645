import math
from fractions import Fraction

import pytest

from divlab.divisor import f_s_brute
from divlab.errors import DomainError
from divlab.primes import prev_prime
from divlab.wolke import WolkeConfig, build, extend, initial_n0


def test_config_validation():
    with pytest.raises(DomainError):
        WolkeConfig.of(2, 1, "0.4")  # bound exponent must stay positive
    with pytest.raises(DomainError):
        WolkeConfig.of(2, 1, "0.5")
    with pytest.raises(DomainError):
        WolkeConfig.of("0.5", 1, "0.1")
    with pytest.raises(DomainError):
        WolkeConfig.of(2, 2, "0.1")
    with pytest.raises(DomainError):
        WolkeConfig.of(2, 1, "0.1", y=0)
    cfg = WolkeConfig.of(2, 1, "0.1")
    assert cfg.bound_exponent == Fraction(3, 10)


def test_initial_product_scan():
    cfg = WolkeConfig.of(2, 1, "0.1")
    n0 = initial_n0(cfg)
    assert n0.primes() == (3, 5, 7, 11)
    # the next prime would overshoot: f(n0) * (1 + 1/13) > 2
    f0 = f_s_brute(n0.value(), 1)
    assert f0 <= 2 < f0 * Fraction(14, 13)

    # when even the first prime above y overshoots, n0 is empty and the
    # first absorbed prime carries the construction
    cfg2 = WolkeConfig.of("1.01", 1, "0.05", max_steps=1)
    assert initial_n0(cfg2).primes() == ()
    seq2 = build(cfg2)
    assert seq2.steps[1].p == 101

    cfg3 = WolkeConfig.of(1, 1, "0.1")
    seq3 = build(cfg3)
    assert seq3.terminated_exact and seq3.last.n.value() == 1
    assert seq3.stop_reason == "exact_hit"


def test_exact_hit_terminates():
    # y = 1 admits 2 and 3: f(6) = 2 exactly
    seq = build(WolkeConfig.of(2, 1, "0.1", y=1, max_steps=5))
    assert seq.terminated_exact
    assert seq.last.n.value() == 6
    assert seq.last.gap == 0 and seq.last.verdict
    with pytest.raises(DomainError):
        extend(seq)


def test_prefix_construction_a2():
    seq = build(WolkeConfig.of(2, 1, "0.1", max_steps=15, prime_cap=10**24))
    # the deterministic-primality frontier stops the run after 4 extensions
    assert seq.stop_reason == "prime_cap"
    assert [st.p for st in seq.steps] == [
        11, 389, 29959, 128194589, 566684450325197]

    fs = [st.f_value for st in seq.steps]
    assert all(a <= b for a, b in zip(fs, fs[1:]))  # one-sided approach
    assert all(f <= 2 for f in fs)

    for st in seq.steps:
        assert st.n.is_squarefree()
        if st.delta is not None:
            # defining identity of delta
            assert st.f_value * (1 + 1 / st.delta) == 2
    primes = [st.p for st in seq.steps]
    assert primes == sorted(primes)

    for st in seq.steps:
        if st.k >= 1:
            assert st.prev_prime_logged is True
            assert st.gap_bound_ok is True


def test_gap_bound_explicitly():
    seq = build(WolkeConfig.of(2, 1, "0.1", max_steps=2))
    for st in seq.steps:
        if st.k < 1:
            continue
        pbar = prev_prime(st.p)
        rhs = 4 * 2 * Fraction(st.p - pbar, st.p**2)
        assert st.gap <= rhs


def test_verdict_matches_float_check():
    cfg = WolkeConfig.of("1.7", 1, "0.2", max_steps=3)
    seq = build(cfg)
    expo = float(cfg.bound_exponent)
    for st in seq.steps:
        gap = float(st.gap)
        if gap == 0:
            continue
        bound = math.exp(-expo * float(st.log_n.value))
        # compare only when comfortably away from the threshold
        if abs(math.log(gap) - math.log(bound)) > 0.1:
            assert st.verdict == (gap < bound)


def test_default_cap_stops_at_three_extensions():
    seq = build(WolkeConfig.of(2, 1, "0.1", max_steps=15))
    assert seq.stop_reason == "prime_cap"
    assert seq.last.k == 3  # the 4th prime sits near 5.7e14, over 1e9


def test_fractional_s_run():
    seq = build(WolkeConfig.of("1.8", "0.5", "0.15", max_steps=2,
                               prime_cap=10**18))
    assert len(seq.steps) == 3
    assert all(st.n.is_squarefree() for st in seq.steps)
    for prev, nxt in zip(seq.steps, seq.steps[1:]):
        assert nxt.p > prev.p
        # nondecreasing approach from below, certified intervals
        assert prev.f_value.upper() <= nxt.f_value.upper() + Fraction(1, 10**20)
        assert nxt.f_value.upper() < Fraction(9, 5)
    for st in seq.steps:
        if st.k >= 1:
            assert st.gap_bound_ok is True


def test_max_steps_zero_records_initial_state():
    seq = build(WolkeConfig.of(2, 1, "0.1", max_steps=0))
    assert len(seq.steps) == 1 and seq.stop_reason == "max_steps"
