"""Closed-form bounds: the Cochrane-Pinner bound B(d, p), the normalizing power
q^(1-1/n), and the finite list of primes where B(d, p) fails to beat it."""

from __future__ import annotations

import math
from dataclasses import dataclass

from flint import fmpq

from .arith import is_prime, primes_up_to
from .numeric import (DEFAULT_PREC, MAX_PREC, CertReal, Order, Undecided,
                      cert_compare, cert_root_power, certainly_less, escalate)

# (exponent of p, exponent of d) in each branch; branch 1 carries (d - 1)
_BRANCH_EXPONENTS = (fmpq(1, 2), fmpq(5, 8), fmpq(3, 4))


def lam(prec: int = DEFAULT_PREC) -> CertReal:
    """The constant 2 * 3^(-1/4) = 1.519671..."""
    return cert_root_power(3, -1, 4, prec) * 2


@dataclass(frozen=True)
class BoundBreakdown:
    branch1: CertReal
    branch2: CertReal
    branch3: CertReal
    value: CertReal
    binding: int

    @property
    def branches(self) -> tuple[CertReal, CertReal, CertReal]:
        return self.branch1, self.branch2, self.branch3


def _branch(k: int, d: int, x: int, prec: int) -> CertReal:
    """Branch k (1, 2 or 3) of the Cochrane-Pinner minimum at real argument x."""
    if k == 1:
        return cert_root_power(x, 1, 2, prec) * (d - 1)
    if k == 2:
        return lam(prec) * cert_root_power(d * x, 5, 8, prec)
    return lam(prec) * cert_root_power(d, 3, 8, prec) * cert_root_power(x, 3, 4, prec)


def cochrane_pinner(d: int, p: int, prec: int = DEFAULT_PREC) -> BoundBreakdown:
    """B(d, p) = min{(d-1) p^(1/2), lam d^(5/8) p^(5/8), lam d^(3/8) p^(3/4)} + 1."""
    if d < 1:
        raise ValueError("d must be positive")
    b = [_branch(k, d, p, prec) for k in (1, 2, 3)]
    low = b[0].min(b[1]).min(b[2])
    binding = min(range(3), key=lambda i: (float(b[i]), i))
    return BoundBreakdown(b[0], b[1], b[2], low + 1, binding + 1)


def stechkin_threshold(q: int, n: int, prec: int = DEFAULT_PREC) -> CertReal:
    """q^(1 - 1/n)."""
    if q < 2 or n < 2:
        raise ValueError("need q >= 2 and n >= 2")
    return cert_root_power(q, n - 1, n, prec)


def _branch_cap(k: int, d: int, n: int, prec: int) -> int | None:
    """Largest integer x with branch_k(x) + 1 > x^(1-1/n) possible, or None.

    Once x^a > c x^b + 1 holds at some X (a > b), it holds for every x >= X,
    because then a x^(a-b) > a c > b c makes the difference increasing.
    """
    if _BRANCH_EXPONENTS[k - 1] >= fmpq(n - 1, n):
        return None

    def solved(x: int) -> bool:
        try:
            return certainly_less(_branch(k, d, x, prec) + 1, stechkin_threshold(x, n, prec))
        except Undecided:
            return False

    hi = 2
    while not solved(hi):
        hi *= 2
    lo = hi // 2
    # invariant: solved(hi), not solved(lo) unless lo < 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if solved(mid):
            hi = mid
        else:
            lo = mid
    return hi - 1


def candidate_prime_cap(d: int, n: int, prec: int = DEFAULT_PREC) -> int:
    """An integer P with B(d, p) <= p^(1-1/n) for every prime p > P."""
    if d <= 2:
        return 0
    caps = [c for c in (_branch_cap(k, d, n, prec) for k in (1, 2, 3)) if c is not None]
    if not caps:
        raise ValueError(f"no branch of B({d}, p) drops below p^(1-1/{n})")
    return min(caps)


def bound_exceeds_threshold(d: int, p: int, n: int, prec: int = DEFAULT_PREC,
                            max_prec: int = MAX_PREC) -> bool:
    """Certified B(d, p) > p^(1-1/n), escalating precision on near-ties."""

    def decide(pr: int) -> bool:
        order = cert_compare(cochrane_pinner(d, p, pr).value, stechkin_threshold(p, n, pr))
        if order is Order.UNDECIDED:
            raise Undecided(f"B({d},{p}) vs {p}^(1-1/{n})")
        return order is Order.GREATER

    return escalate(decide, prec, max_prec)


def candidate_primes(d: int, n: int, prec: int = DEFAULT_PREC,
                     max_prec: int = MAX_PREC) -> list[int]:
    """Primes p not dividing n with gcd(n, p-1) = d and B(d, p) > p^(1-1/n)."""
    if d < 3 or n % d:
        raise ValueError("need d >= 3 dividing n")
    cap = candidate_prime_cap(d, n, prec)
    out = []
    for p in range(d + 1, cap + 1, d):
        if n % p == 0 or math.gcd(n, p - 1) != d or not is_prime(p):
            continue
        if bound_exceeds_threshold(d, p, n, prec, max_prec):
            out.append(p)
    return out


def primes_in_progression(d: int, limit: int) -> list[int]:
    """Primes p <= limit with p = 1 (mod d)."""
    return [int(p) for p in primes_up_to(limit) if p % d == 1]
