import math
from fractions import Fraction

import numpy as np
import pytest

from divlab.config import Caps
from divlab.density import (
    approximate,
    choose_exponents,
    divergence_partial_product,
    greedy_select,
    range_upper_bound,
    rupture_report,
    tail_product_bound,
    to_fraction,
)
from divlab.divisor import Exponent, f_s, f_s_of_int
from divlab.errors import DomainError, ResourceLimitError
from divlab.primes import factorize, prev_prime, sieve_upto


def test_greedy_exact_hits():
    sel = greedy_select(2, 1, "0.5")
    assert sel.exact_hit and sel.primes == (2,) and sel.q_product == 2
    sel3 = greedy_select(3, 1, "0.1")
    assert sel3.exact_hit and sel3.primes == (2, 3)


def test_greedy_bracket_example():
    sel = greedy_select("1.9", 1, "0.01")
    assert sel.primes[0] == 3  # the factor of 2 already exceeds 1.9
    assert Fraction(189, 100) < sel.q_product <= Fraction(19, 10)


def test_greedy_maximality(rng):
    # skipping was forced: the prime just below each selected one overshoots
    for _ in range(15):
        a = Fraction(rng.randrange(1100, 9000), 1000)
        sel = greedy_select(a, 1, Fraction(1, 1000))
        q = Fraction(1)
        prev_q = None
        for p in sel.primes:
            if prev_q is not None and prev_q + 1 < p:
                gap_prime = prev_prime(p)
                if gap_prime > (prev_q or 1):
                    assert q * Fraction(gap_prime, gap_prime - 1) > a
            q *= Fraction(p, p - 1)
            prev_q = p
        assert a - Fraction(1, 1000) < q <= a


def test_greedy_domain_errors():
    with pytest.raises(DomainError):
        greedy_select(1, 1, "0.1")
    with pytest.raises(DomainError):
        greedy_select(2, 2, "0.1")
    with pytest.raises(DomainError):
        greedy_select(2, 1, 0)


def test_greedy_prime_cap():
    with pytest.raises(ResourceLimitError):
        greedy_select("1.0000001", 1, "1e-9", Caps(prime_cap=100))


def test_choose_exponents_examples():
    sel = greedy_select(2, 1, "0.5")
    assert choose_exponents(sel, Fraction(1, 4)) == {2: 3}
    # first exponent whose value clears 2 - 1/100 is 7: f_1(2^7) = 255/128
    assert choose_exponents(sel, Fraction(1, 100)) == {2: 7}
    assert f_s_of_int(2**7, 1) == Fraction(255, 128) > Fraction(199, 100)
    # generous eps keeps every exponent at 1
    selq = greedy_select(Fraction(5, 2), 1, Fraction(1, 10))
    assert set(choose_exponents(selq, Fraction(2)).values()) == {1}


def test_choose_exponents_bracket(rng):
    for _ in range(10):
        a = Fraction(rng.randrange(1500, 8000), 1000)
        eps = Fraction(1, rng.choice([50, 500]))
        sel = greedy_select(a, 1, eps)
        exps = choose_exponents(sel, eps)
        value = f_s(factorize(1).from_map(exps), 1)
        assert sel.q_product - eps < value < sel.q_product or sel.exact_hit


def test_choose_exponents_cap():
    sel = greedy_select(2, 1, "0.5")
    with pytest.raises(ResourceLimitError):
        choose_exponents(sel, Fraction(1, 2**40), Caps(exponent_cap=8))


@pytest.mark.parametrize("s", [1, "0.7", "0.5"])
def test_approximate_bracket_sample(rng, s):
    s = Exponent.of(s)
    caps = Caps(prime_cap=10**12)  # small s needs primes near (Q/eps)^(1/s)
    for _ in range(12):
        a = Fraction(rng.randrange(1001, 10000), 1000)
        eps = rng.choice([Fraction(1, 100), Fraction(1, 10**4)])
        sol = approximate(a, s, eps, caps)
        if s.is_integer:
            assert abs(sol.value - a) < eps
            assert sol.value > 1
        else:
            err = abs(sol.value - a)
            assert err.upper() < eps
            assert sol.value.lower() > 1


def test_approximate_examples():
    sol = approximate(2, 1, Fraction(1, 1000))
    assert abs(sol.value - 2) < Fraction(1, 1000)
    assert sol.n.factors[0][0] == 2 and sol.n.factors[0][1] >= 11

    sol1 = approximate(1, 1, "0.01")
    assert sol1.n.factors[0][0] >= 101
    assert sol1.achieved_error < Fraction(1, 100)

    half_pi = "1.5707963267948966"
    solpi = approximate(half_pi, 1, "0.0001")
    assert abs(solpi.value - to_fraction(half_pi)) < Fraction(1, 10**4)


def test_approximate_domain():
    with pytest.raises(DomainError):
        approximate(2, 2, "0.1")
    with pytest.raises(DomainError):
        approximate("0.9", 1, "0.1")
    with pytest.raises(DomainError):
        approximate(2, 0, "0.1")


def test_monotone_refinement_fixed_grid():
    # halving eps never worsened the achieved error on this frozen grid
    targets = ["1.37", "2.25", "3.141592", "5.5", "9.99"]
    for a in targets:
        for s in (1, "0.7"):
            prev_err = None
            for eps in (Fraction(1, 10), Fraction(1, 20), Fraction(1, 40)):
                sol = approximate(a, s, eps)
                err = sol.achieved_error
                err_hi = err if isinstance(err, Fraction) else err.upper()
                if prev_err is not None:
                    assert err_hi <= prev_err
                prev_err = err_hi


def test_divergence_partial_products():
    # s <= 1: partial products exceed any fixed bound (oracle: direct product)
    p15 = divergence_partial_product(15485863, 1)
    assert p15 > 10
    table = sieve_upto(10**5)
    ps = table.primes.astype(np.float64)
    oracle = float(np.prod(1.0 + 1.0 / (ps - 1.0)))
    assert abs(divergence_partial_product(10**5, 1) - oracle) < 1e-9 * oracle


def test_range_upper_bound_values():
    assert abs(float(range_upper_bound(2).value) - math.pi**2 / 6) < 1e-9
    assert abs(float(range_upper_bound(4).value) - math.pi**4 / 90) < 1e-9
    big = range_upper_bound("1.0001", precision=1e-6)
    assert float(big.value) > 9000
    assert float(big.abs_error) <= 1e-6
    with pytest.raises(DomainError):
        range_upper_bound(1)


def test_tail_product_bound_is_upper_bound():
    # oracle: direct partial products; the certified bound dominates them
    table = sieve_upto(10**6)
    ps = table.primes.astype(np.float64)
    for q0 in (2, 3, 101):
        sel = ps[ps >= q0]
        partial = float(np.prod(1.0 + 1.0 / (sel * sel - 1.0)))
        bound = tail_product_bound(q0, 2)
        assert float(bound.upper()) >= partial
    # from 2 the true infinite product is zeta(2) = pi^2/6 (Euler product)
    assert tail_product_bound(2, 2).upper() > Fraction(16449, 10000)
    # far tails shrink toward 1
    assert float(tail_product_bound(10**6, 2).upper()) < 1.00001
    with pytest.raises(DomainError):
        tail_product_bound(2, 1)


def test_rupture_outcomes():
    assert rupture_report("1.7", 2).kind == "provably_unreachable"
    assert rupture_report(1, 2).kind == "feasible"
    rep = rupture_report("1.26", 2)
    assert rep.kind == "feasible"
    assert rep.greedy_ceiling is not None
    with pytest.raises(DomainError):
        rupture_report("1.5", 1)


def test_rupture_soundness_on_attained_values():
    # every actually-attained value must never be called unreachable;
    # f_2(10) = 13/10 is the canonical trap for greedy-prefix certificates
    assert f_s_of_int(10, 2) == Fraction(13, 10)
    assert rupture_report(Fraction(13, 10), 2).kind == "feasible"
    for m in range(2, 200):
        v = f_s_of_int(m, 2)
        assert rupture_report(v, 2).kind == "feasible", m


def test_rupture_fractional_s():
    rep = rupture_report("1.2", "1.5")
    assert rep.kind in ("feasible", "provably_unreachable")
    assert rupture_report("3.0", "1.5").kind == "provably_unreachable"
