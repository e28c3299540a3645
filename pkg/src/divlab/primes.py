"""Prime generation, navigation and factorization.

A shared, lazily growing ``PrimeTable`` (segmented sieve) backs bulk
iteration; point queries (``next_prime``/``prev_prime``/``is_prime``) fall
back to a *deterministic* Miller-Rabin test above the sieved range, which is
a proven primality decision for every n below DETERMINISTIC_LIMIT.  Nothing
in this module is probabilistic.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .bounded import DEFAULT_BITS, BoundedReal, ln_int
from .errors import DomainError, ResourceLimitError

#: default hard cap for on-demand prime generation / navigation
DEFAULT_PRIME_CAP = 10**9

#: Miller-Rabin with the first 13 prime bases is a deterministic primality
#: test below this bound (Sorenson & Webster).
DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)

_SEGMENT = 1 << 20


def _sieve_array(limit: int) -> np.ndarray:
    """Plain sieve of Eratosthenes, primes <= limit as int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


class PrimeTable:
    """Ascending primes up to ``limit``, extendable on demand.

    Extension is synchronized; readers always observe a consistent
    (limit, primes) snapshot because the pair is swapped atomically.
    """

    def __init__(self, limit: int = 2, hard_cap: int = DEFAULT_PRIME_CAP):
        if limit < 2:
            raise DomainError("PrimeTable limit must be >= 2")
        if limit > hard_cap:
            raise ResourceLimitError(
                f"sieve limit {limit} exceeds prime cap {hard_cap}"
            )
        self.hard_cap = hard_cap
        self._lock = threading.Lock()
        self._state: Tuple[int, np.ndarray] = (limit, _sieve_array(limit))

    @property
    def limit(self) -> int:
        return self._state[0]

    @property
    def primes(self) -> np.ndarray:
        return self._state[1]

    def __len__(self) -> int:
        return len(self._state[1])

    def extend_to(self, new_limit: int) -> None:
        if new_limit <= self.limit:
            return
        if new_limit > self.hard_cap:
            raise ResourceLimitError(
                f"prime generation to {new_limit} exceeds cap {self.hard_cap}"
            )
        with self._lock:
            limit, primes = self._state
            if new_limit <= limit:
                return
            # segmented extension: base primes up to sqrt(new_limit)
            root = int(new_limit**0.5) + 1
            if limit < root:
                base = _sieve_array(root)
            else:
                base = primes[primes <= root]
            chunks = [primes]
            lo = limit + 1
            while lo <= new_limit:
                hi = min(lo + _SEGMENT - 1, new_limit)
                mask = np.ones(hi - lo + 1, dtype=bool)
                for p in base:
                    p = int(p)
                    if p * p > hi:
                        break
                    start = max(p * p, ((lo + p - 1) // p) * p)
                    mask[start - lo :: p] = False
                chunks.append(np.flatnonzero(mask).astype(np.int64) + lo)
                lo = hi + 1
            self._state = (new_limit, np.concatenate(chunks))

    def contains(self, n: int) -> bool:
        limit, primes = self._state
        if n > limit:
            raise DomainError(f"{n} beyond table limit {limit}")
        i = np.searchsorted(primes, n)
        return i < len(primes) and primes[i] == n

    def iter_from(self, start: int = 2) -> Iterator[int]:
        """Yield primes >= start in ascending order, growing the table as
        needed; raises ResourceLimitError past the hard cap."""
        pos = None
        while True:
            limit, primes = self._state
            if pos is None:
                pos = int(np.searchsorted(primes, start))
            while pos < len(primes):
                yield int(primes[pos])
                pos += 1
            if limit >= self.hard_cap:
                raise ResourceLimitError(
                    f"prime iteration exhausted cap {self.hard_cap}"
                )
            self.extend_to(min(self.hard_cap, max(limit * 2, 1 << 16)))


_shared_table: Optional[PrimeTable] = None
_shared_lock = threading.Lock()


def shared_table() -> PrimeTable:
    global _shared_table
    if _shared_table is None:
        with _shared_lock:
            if _shared_table is None:
                _shared_table = PrimeTable(1 << 16)
    return _shared_table


def sieve_upto(limit: int, hard_cap: int = DEFAULT_PRIME_CAP) -> PrimeTable:
    """Fresh table holding exactly the primes <= limit."""
    if limit < 2:
        raise DomainError("sieve_upto needs limit >= 2")
    return PrimeTable(limit, hard_cap=hard_cap)


def is_prime(n: int) -> bool:
    """Exact primality for any n < DETERMINISTIC_LIMIT."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= DETERMINISTIC_LIMIT:
        raise ResourceLimitError(
            f"{n} exceeds the deterministic primality range {DETERMINISTIC_LIMIT}"
        )
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(p: int, cap: Optional[int] = None) -> int:
    """Smallest prime strictly greater than p."""
    if p < 1:
        raise DomainError("next_prime needs p >= 1")
    if p < 2:
        return 2
    c = p + 1 if p % 2 == 0 else p + 2
    while True:
        if cap is not None and c > cap:
            raise ResourceLimitError(f"next_prime({p}) exceeded cap {cap}")
        if is_prime(c):
            return c
        c += 2


def prev_prime(p: int) -> int:
    """Largest prime strictly less than p."""
    if p <= 2:
        raise DomainError("no prime below 2")
    if p == 3:
        return 2
    c = p - 1 if p % 2 == 0 else p - 2
    while c >= 3:
        if is_prime(c):
            return c
        c -= 2
    return 2


def first_prime_at_least(n: int, cap: Optional[int] = None) -> int:
    """Smallest prime >= n (threshold searches use non-strict bounds)."""
    if n <= 2:
        return 2
    if cap is not None and n > cap:
        raise ResourceLimitError(f"prime search from {n} exceeds cap {cap}")
    if n % 2 == 1 and is_prime(n):
        return n
    return next_prime(n - 1, cap=cap)


@dataclass(frozen=True)
class Factorization:
    """A positive integer in factored form: ((prime, exponent), ...) ascending.

    The empty tuple represents 1.  Factored form is the only representation
    large constructed integers ever take; ``value`` materializes small ones.
    """

    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        last = 1
        for p, k in self.factors:
            if p <= last:
                raise DomainError("factors must be strictly ascending primes")
            if k < 1:
                raise DomainError("exponents must be >= 1")
            if not is_prime(p):
                raise DomainError(f"{p} is not prime")
            last = p

    @classmethod
    def from_map(cls, factors: Dict[int, int]) -> "Factorization":
        return cls(tuple(sorted((int(p), int(k)) for p, k in factors.items())))

    @classmethod
    def one(cls) -> "Factorization":
        return cls(())

    def as_map(self) -> Dict[int, int]:
        return dict(self.factors)

    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def value(self) -> int:
        n = 1
        for p, k in self.factors:
            n *= p**k
        return n

    def log_value(self, bits: int = DEFAULT_BITS) -> BoundedReal:
        """Sum of k*ln(p), with a certified error bound."""
        total = BoundedReal.exact(0, bits)
        for p, k in self.factors:
            total = total + ln_int(p, bits) * k
        return total

    def bit_length_estimate(self) -> int:
        return sum(k * p.bit_length() for p, k in self.factors)

    def times_prime(self, p: int) -> "Factorization":
        f = self.as_map()
        f[p] = f.get(p, 0) + 1
        return Factorization.from_map(f)

    def divides_value(self, p: int) -> bool:
        return any(q == p for q, _ in self.factors)

    def coprime_to(self, n: int) -> bool:
        return all(n % p != 0 for p, _ in self.factors)

    def is_squarefree(self) -> bool:
        return all(k == 1 for _, k in self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(
            f"{p}^{k}" if k > 1 else str(p) for p, k in self.factors
        )


#: trial-division ceiling for factorize; larger inputs must arrive factored
_TRIAL_LIMIT = 10**7
_FACTORIZE_MAX = 2**63


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Factor a native-range integer by trial division over sieved primes,
    finishing with a deterministic primality check on the cofactor."""
    if n < 1:
        raise DomainError("factorize needs n >= 1")
    if n >= _FACTORIZE_MAX:
        raise DomainError(
            "factorize only accepts native-range integers; build large "
            "numbers in factored form instead"
        )
    if n == 1:
        return Factorization(())
    table = shared_table()
    out = []
    rest = n
    root = int(rest**0.5) + 1
    if root > table.limit:
        table.extend_to(min(max(root, 1 << 16), _TRIAL_LIMIT))
    for p in table.iter_from(2):
        if p * p > rest:
            break
        if p > _TRIAL_LIMIT:
            raise ResourceLimitError(
                f"trial division budget exceeded factoring {n}"
            )
        if rest % p == 0:
            k = 0
            while rest % p == 0:
                rest //= p
                k += 1
            out.append((p, k))
    if rest > 1:
        if not is_prime(rest):
            raise ResourceLimitError(
                f"cofactor {rest} of {n} resists trial division"
            )
        out.append((rest, 1))
    out.sort()
    return Factorization(tuple(out))


def smallest_prime_not_in(fact: Factorization) -> int:
    """Smallest prime that does not divide the factored integer."""
    members = set(fact.primes())
    for p in shared_table().iter_from(2):
        if p not in members:
            return p
    raise ResourceLimitError("prime cap hit before finding an outside prime")


def parse_factored(text: str) -> Factorization:
    """Parse '2^3*5^2*11' style input; bases must be prime."""
    text = text.strip()
    if text in ("", "1"):
        return Factorization(())
    factors: Dict[int, int] = {}
    for term in text.split("*"):
        term = term.strip()
        if "^" in term:
            base_s, _, exp_s = term.partition("^")
            base, k = int(base_s), int(exp_s)
        else:
            base, k = int(term), 1
        if k < 1:
            raise DomainError(f"exponent must be >= 1 in {term!r}")
        if not is_prime(base):
            raise DomainError(f"{base} is not prime in factored input")
        factors[base] = factors.get(base, 0) + k
    return Factorization.from_map(factors)
