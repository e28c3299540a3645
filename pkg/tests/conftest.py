"""Shared oracles for the test suite.

Everything here is deliberately independent of the package internals:
divisor tables come from a multiples loop, primality from trial division.
"""

import random

import pytest


def trial_division_primes(limit):
    """Brute-force prime list, the oracle for sieve checks."""
    out = []
    for n in range(2, limit + 1):
        d = 2
        is_p = True
        while d * d <= n:
            if n % d == 0:
                is_p = False
                break
            d += 1
        if is_p:
            out.append(n)
    return out


def divisor_table(limit):
    """divisors[n] for n <= limit via the multiples loop (no factoring)."""
    table = [[] for _ in range(limit + 1)]
    for d in range(1, limit + 1):
        for m in range(d, limit + 1, d):
            table[m].append(d)
    return table


@pytest.fixture(scope="session")
def divisors_1e4():
    return divisor_table(10**4)


@pytest.fixture()
def rng():
    return random.Random(20260810)
