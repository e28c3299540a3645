import threading

import numpy as np
import pytest

from divlab.errors import DomainError, ResourceLimitError
from divlab.primes import (
    DETERMINISTIC_LIMIT,
    Factorization,
    PrimeTable,
    factorize,
    first_prime_at_least,
    is_prime,
    next_prime,
    parse_factored,
    prev_prime,
    sieve_upto,
    shared_table,
    smallest_prime_not_in,
)

from conftest import trial_division_primes


def test_sieve_small_examples():
    assert list(sieve_upto(10).primes) == [2, 3, 5, 7]
    assert list(sieve_upto(2).primes) == [2]


def test_sieve_against_trial_division_oracle():
    limit = 20000
    assert list(sieve_upto(limit).primes) == trial_division_primes(limit)


def test_prime_count_at_1e6_cross_checked():
    # independent second implementation: bytearray sieve
    limit = 10**6
    mark = bytearray(b"\x01") * (limit + 1)
    mark[0] = mark[1] = 0
    for p in range(2, int(limit**0.5) + 1):
        if mark[p]:
            mark[p * p :: p] = b"\x00" * len(range(p * p, limit + 1, p))
    expected = sum(mark)
    table = sieve_upto(limit)
    assert len(table) == expected == 78498


def test_next_prime_examples():
    assert next_prime(7) == 11
    assert next_prime(1) == 2
    assert next_prime(10**6) == 1000003
    # oracle: trial division on the candidates above 10^6
    for c in range(10**6 + 1, 1000003):
        assert any(c % d == 0 for d in range(2, int(c**0.5) + 1))
    assert all(1000003 % d for d in range(2, 1001))


def test_prev_prime_examples():
    assert prev_prime(11) == 7
    assert prev_prime(3) == 2
    assert prev_prime(1000003) == 999983
    with pytest.raises(DomainError):
        prev_prime(2)


def test_navigation_agrees_with_table():
    table = sieve_upto(10**4)
    ps = [int(p) for p in table.primes]
    for a, b in zip(ps[:400], ps[1:401]):
        assert next_prime(a) == b
        assert prev_prime(b) == a
        assert prev_prime(next_prime(a)) <= a < next_prime(a)


def test_bertrand_style_gap_below_1e6():
    ps = sieve_upto(10**6).primes
    # prev_prime(p) > p/2 for every prime p in [3, 10^6]
    assert np.all(2 * ps[:-1] > ps[1:])


def test_factorize_examples():
    assert factorize(360).as_map() == {2: 3, 3: 2, 5: 1}
    assert factorize(1).as_map() == {}
    assert factorize(784).as_map() == {2: 4, 7: 2}


def test_factorize_reconstructs_all_small_n():
    for n in range(1, 10**5 + 1):
        assert factorize(n).value() == n


def test_factorize_domain_and_resources():
    with pytest.raises(DomainError):
        factorize(0)
    with pytest.raises(DomainError):
        factorize(2**63)


def test_is_prime_matches_oracle_and_limit():
    oracle = set(trial_division_primes(3000))
    for n in range(1, 3000):
        assert is_prime(n) == (n in oracle)
    # deterministic far range: a known large prime pair
    assert is_prime(2**61 - 1)
    assert not is_prime(2**61 + 1)
    # past the proven-bases range only small-factor composites are decidable
    c = DETERMINISTIC_LIMIT + 1
    while any(c % p == 0 for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)):
        c += 1
    with pytest.raises(ResourceLimitError):
        is_prime(c)


def test_smallest_prime_not_in():
    assert smallest_prime_not_in(factorize(6)) == 5
    assert smallest_prime_not_in(factorize(1)) == 2
    assert smallest_prime_not_in(factorize(2)) == 3


def test_factorization_type_invariants():
    with pytest.raises(DomainError):
        Factorization(((4, 1),))  # descending/bad order caught by from_map path
    with pytest.raises(DomainError):
        Factorization(((3, 1), (2, 1)))
    with pytest.raises(DomainError):
        Factorization(((2, 0),))
    f = factorize(360)
    assert f.log_value().lower() > 0
    # log within stated bound of the true logarithm
    import math

    true = math.log(360)
    assert float(f.log_value().lower()) <= true <= float(f.log_value().upper())
    assert f.times_prime(7).value() == 2520
    assert f.is_squarefree() is False
    assert factorize(30).is_squarefree()


def test_parse_factored():
    assert parse_factored("2^3*5^2*11").value() == 2200
    assert parse_factored("1").value() == 1
    assert str(parse_factored("11*2^3")) == "2^3*11"
    with pytest.raises(DomainError):
        parse_factored("6^2")
    with pytest.raises(DomainError):
        parse_factored("2^0")


def test_table_extension_and_caps():
    t = PrimeTable(100, hard_cap=10**6)
    t.extend_to(10**4)
    assert t.limit == 10**4
    with pytest.raises(ResourceLimitError):
        t.extend_to(10**7)
    it = t.iter_from(9973)
    assert next(it) == 9973
    assert next(it) == 10007  # grows on demand
    with pytest.raises(ResourceLimitError):
        PrimeTable(100, hard_cap=50)


def test_concurrent_extension_consistent():
    t = PrimeTable(100)
    seen = []

    def worker():
        local = [p for _, p in zip(range(2000), t.iter_from(2))]
        seen.append(local)

    threads = [threading.Thread(target=worker) for _ in range(4)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(s == seen[0] for s in seen)


def test_first_prime_at_least():
    assert first_prime_at_least(14) == 17
    assert first_prime_at_least(17) == 17
    assert first_prime_at_least(1) == 2
    with pytest.raises(ResourceLimitError):
        first_prime_at_least(10**7, cap=10**6)
