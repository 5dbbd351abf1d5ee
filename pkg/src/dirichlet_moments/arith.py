"""Exact integer arithmetic: factorization and the multiplicative functions used throughout."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

MAX_INT = 2**63 - 1
SIEVE_LIMIT = 10**6


@dataclass(frozen=True)
class Factorization:
    """Prime powers of ``n``, ascending by prime."""

    n: int
    prime_powers: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        prod = 1
        last = 1
        for p, e in self.prime_powers:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.prime_powers}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factorization {self.prime_powers} does not multiply to {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.prime_powers)

    def __iter__(self):
        return iter(self.prime_powers)

    def __len__(self) -> int:
        return len(self.prime_powers)


@lru_cache(maxsize=None)
def _sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return np.flatnonzero(flags)


def primes_up_to(limit: int) -> np.ndarray:
    """All primes ``p <= limit`` as an int64 array."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    if limit <= SIEVE_LIMIT:
        ps = _sieve(SIEVE_LIMIT)
        return ps[: np.searchsorted(ps, limit, side="right")].astype(np.int64)
    return _sieve(limit).astype(np.int64)


def _check_domain(n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError(f"expected a positive integer, got {n}")
    if n > MAX_INT:
        raise OverflowError(f"{n} exceeds 2^63 - 1")
    return n


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for all n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    # n is odd and composite with no factor below the sieve limit
    for c in range(1, 100):
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(128, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += 128
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"failed to split {n}")


def _split_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split_large(d, out)
    _split_large(n // d, out)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Exact prime factorization of ``1 <= n <= 2^63 - 1``.

    Trial division by sieved primes up to 10^6; a leftover cofactor above
    10^12 is split by Pollard-Brent.
    """
    n = _check_domain(n)
    out: dict[int, int] = {}
    m = n
    for p in _sieve(SIEVE_LIMIT):
        p = int(p)
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
    if m > 1:
        if m < SIEVE_LIMIT**2:
            out[m] = out.get(m, 0) + 1
        else:
            _split_large(m, out)
    return Factorization(n, tuple(sorted(out.items())))


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    result = _check_domain(n)
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def tau3(n: int) -> int:
    """Number of ordered triples (a, b, c) with abc = n."""
    out = 1
    for _, e in factorize(n):
        out *= (e + 1) * (e + 2) // 2
    return out


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def radical(n: int) -> int:
    return math.prod(factorize(n).primes)


def sigma_prime_power(p: int, e: int, t: Sequence[complex]) -> complex:
    """sigma(p^e; t): sum over a+b+c = e of p^-(a t1 + b t2 + c t3)."""
    x = [complex(p) ** (-complex(ti)) for ti in t]
    total = 0j
    for a in range(e + 1):
        xa = x[0] ** a
        for b in range(e - a + 1):
            total += xa * x[1] ** b * x[2] ** (e - a - b)
    return total


def sigma_shifted(m: int, t: Sequence[complex]) -> complex:
    """Shifted ternary divisor sum sum_{m = m1 m2 m3} m1^-t1 m2^-t2 m3^-t3."""
    if len(t) != 3:
        raise ValueError("sigma_shifted takes a 3-tuple of shifts")
    out = 1 + 0j
    for p, e in factorize(m):
        out *= sigma_prime_power(p, e, t)
    return out


def smallest_prime_factor_table(limit: int) -> np.ndarray:
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in primes_up_to(math.isqrt(limit)):
        p = int(p)
        block = spf[p * p :: p]
        block[block == 0] = p
    rest = spf == 0
    spf[rest] = np.arange(limit + 1)[rest]
    return spf


def mobius_table(limit: int) -> np.ndarray:
    """mu(k) for 0 <= k <= limit (entry 0 is 0)."""
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(limit):
        p = int(p)
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
    return mu


def phi_table(limit: int) -> np.ndarray:
    phi = np.arange(limit + 1, dtype=np.int64)
    for p in primes_up_to(limit):
        p = int(p)
        phi[p::p] -= phi[p::p] // p
    return phi


def multiplicative_table(limit: int, local, dtype=complex) -> np.ndarray:
    """Values f(1..limit) of the multiplicative f with f(p^e) = local(p, e).

    Entry 0 is left at zero.
    """
    out = np.ones(limit + 1, dtype=dtype)
    out[0] = 0
    for p in primes_up_to(limit):
        p = int(p)
        pe, e = p, 1
        while pe <= limit:
            idx = np.arange(pe, limit + 1, pe)
            # exact valuation e
            out[idx[(idx // pe) % p != 0]] *= local(p, e)
            pe *= p
            e += 1
    return out


def sigma_table(limit: int, t: Sequence[complex]) -> np.ndarray:
    """sigma(m; t) for 0 <= m <= limit.

    Primes up to sqrt(limit) go prime power by prime power; what is left of m after
    removing them is 1 or a single prime P, contributing sum_i P^-t_i.
    """
    small = int(math.isqrt(limit))
    out = np.ones(limit + 1, dtype=complex)
    out[0] = 0
    rem = np.arange(limit + 1, dtype=np.int64)
    for p in primes_up_to(small):
        p = int(p)
        pe, e = p, 1
        while pe <= limit:
            idx = np.arange(pe, limit + 1, pe)
            out[idx[(idx // pe) % p != 0]] *= sigma_prime_power(p, e, t)
            rem[idx] //= p
            pe *= p
            e += 1
    big = np.flatnonzero(rem > 1)
    logp = np.log(rem[big].astype(float))
    out[big] *= sum(np.exp(-complex(ti) * logp) for ti in t)
    return out
