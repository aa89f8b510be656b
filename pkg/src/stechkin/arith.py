"""Exact integer number theory used by the Gauss-sum engines."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

_TRIAL_LIMIT = 10 ** 5

# deterministic Miller-Rabin bases, valid below 3.3 * 10**24
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, ascending (sieve of Eratosthenes)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for i in range(3, math.isqrt(limit) + 1, 2):
        if sieve[i]:
            sieve[i * i::2 * i] = False
    return np.flatnonzero(sieve).astype(np.int64)


_SMALL_PRIMES = tuple(int(p) for p in primes_up_to(_TRIAL_LIMIT))


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    for p in _SMALL_PRIMES[:40]:
        if q == p:
            return True
        if q % p == 0:
            return False
    d, s = q - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, q)
        if x == 1 or x == q - 1:
            continue
        for _ in range(s - 1):
            x = x * x % q
            if x == q - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """Prime factorization as ``((p1, e1), (p2, e2), ...)`` with p1 < p2 < ..."""

    factors: tuple[tuple[int, int], ...]

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p ** e
        return out

    def valuation(self, p: int) -> int:
        for r, e in self.factors:
            if r == p:
                return e
        return 0

    def prime_powers(self) -> list[int]:
        return [p ** e for p, e in self.factors]


def _rho(n: int, seed: int) -> int:
    """A nontrivial factor of composite n (Brent's variant of Pollard rho)."""
    rng = random.Random(seed)
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
        seed += 1
        rng = random.Random(seed)


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    seed = 1
    f = _rho(n, seed)
    _split(f, out)
    _split(n // f, out)


@lru_cache(maxsize=1 << 16)
def factorize(q: int) -> Factorization:
    if q < 1:
        raise ValueError("factorize needs q >= 1")
    found: dict[int, int] = {}
    n = q
    for p in _SMALL_PRIMES:
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            found[p] = e
    if n > 1:
        if n < _TRIAL_LIMIT ** 2:
            found[n] = found.get(n, 0) + 1
        else:
            _split(n, found)
    return Factorization(tuple(sorted(found.items())))


def divisors(n: int) -> list[int]:
    if n < 1:
        raise ValueError("divisors needs n >= 1")
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def euler_phi(n: int) -> int:
    if n < 1:
        raise ValueError("euler_phi needs n >= 1")
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


@lru_cache(maxsize=1 << 16)
def primitive_root(p: int) -> int:
    """Smallest generator of the multiplicative group modulo the odd prime p."""
    if p < 3 or not is_prime(p):
        raise ValueError(f"{p} is not an odd prime")
    cofactors = [(p - 1) // r for r in factorize(p - 1).primes]
    for g in range(2, p):
        if all(pow(g, c, p) != 1 for c in cofactors):
            return g
    raise AssertionError("unreachable: every prime has a primitive root")


def multiplicative_order(a: int, q: int) -> int:
    if math.gcd(a, q) != 1:
        raise ValueError("a must be a unit modulo q")
    order = euler_phi(q)
    for r, e in factorize(order):
        for _ in range(e):
            if pow(a, order // r, q) == 1:
                order //= r
            else:
                break
    return order


def centered_residue(b: int, p: int) -> int:
    """The representative of b mod p in (-p/2, p/2), p odd."""
    r = b % p
    return r - p if 2 * r > p else r


def powmod_array(x: np.ndarray, n: int, q: int) -> np.ndarray:
    """Elementwise x**n mod q for int64 arrays; needs q**2 < 2**63."""
    if q >= 3_037_000_499:
        raise OverflowError("modulus too large for int64 modular powering")
    base = np.asarray(x, dtype=np.int64) % q
    result = np.ones_like(base) % q
    while n:
        if n & 1:
            result = result * base % q
        n >>= 1
        if n:
            base = base * base % q
    return result


def power_table(g: int, p: int) -> np.ndarray:
    """``table[k] = g**k mod p`` for 0 <= k < p - 1, built by doubling."""
    size = p - 1
    table = np.ones(1, dtype=np.int64)
    while len(table) < size:
        step = pow(g, len(table), p)
        table = np.concatenate([table, table * step % p])
    return table[:size]


def crt(residues: list[int], moduli: list[int]) -> int:
    """Solve x = r_i (mod m_i) for pairwise coprime moduli."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        # x + m*k = r (mod mi)
        k = (r - x) * pow(m, -1, mi) % mi
        x += m * k
        m *= mi
    return x % m
