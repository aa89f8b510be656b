"""Evaluation of the sums S_n(a, q) and their maxima G_n(q).

Four routes are provided:

* ``gauss_sum_direct`` -- the definition, through the histogram of x**n mod q;
* ``g_d_prime`` -- prime moduli via the cosets of the d-th powers in F_p^*;
* ``g_prime_power`` -- prime powers, maximizing over classes of a modulo the
  n-th powers of units (S_n(a u**n, q) = S_n(a, q));
* ``g_composite`` -- products over the prime-power factors (CRT).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import (crt, factorize, is_prime, powmod_array, power_table,
                    primitive_root)
from .numeric import DEFAULT_PREC, CertReal, cert_hypot, trig_column_sums, trig_sum

DIRECT_CAP = 10 ** 8


class ModulusTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class CandidateContext:
    """Standing notation for a pair (n, p): d = gcd(n, p-1), t = (p-1)/d."""

    n: int
    p: int
    d: int
    t: int
    g: int

    @classmethod
    def build(cls, n: int, p: int) -> "CandidateContext":
        if p < 3 or not is_prime(p):
            raise ValueError(f"{p} is not an odd prime")
        d = math.gcd(n, p - 1)
        return cls(n, p, d, (p - 1) // d, primitive_root(p))

    def __post_init__(self):
        if self.d * self.t != self.p - 1 or math.gcd(self.n, self.p - 1) != self.d:
            raise ValueError(f"inconsistent context {self}")


@dataclass(frozen=True)
class GaussValue:
    magnitude: CertReal
    argmax_a: int
    method: str
    n: int
    modulus: int


@lru_cache(maxsize=16)
def _powers(g: int, p: int) -> np.ndarray:
    return power_table(g, p)


def _check_cap(q: int, cap: int) -> None:
    if q > cap:
        raise ModulusTooLarge(f"modulus {q} exceeds the direct-evaluation cap {cap}")


@lru_cache(maxsize=64)
def residue_histogram(n: int, q: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct values of x**n mod q over all residues x, with multiplicities."""
    values = powmod_array(np.arange(q, dtype=np.int64), n, q)
    return np.unique(values, return_counts=True)


def gauss_sum_direct(n: int, a: int, q: int, prec: int = DEFAULT_PREC,
                     cap: int = DIRECT_CAP) -> tuple[CertReal, CertReal]:
    """S_n(a, q) from its definition, as (real part, imaginary part)."""
    if n < 1 or q < 2:
        raise ValueError("need n >= 1 and q >= 2")
    _check_cap(q, cap)
    values, counts = residue_histogram(n, q)
    return trig_sum(q, (a % q) * values % q, counts, prec=prec)


def _complex_mul(x, y):
    (a, b), (c, d) = x, y
    return a * c - b * d, a * d + b * c


def gauss_sum(n: int, a: int, q: int, prec: int = DEFAULT_PREC,
              cap: int = DIRECT_CAP) -> tuple[CertReal, CertReal]:
    """S_n(a, q) as a product of sums over the prime-power factors of q."""
    if q < 2:
        raise ValueError("need q >= 2")
    one = CertReal.exact(1, prec)
    total = (one, one - 1)
    for qi in factorize(q).prime_powers():
        # S_n(a, q) = prod_i S_n(a (q/q_i)^(n-1), q_i)
        ai = a * pow(q // qi, n - 1, qi) % qi
        total = _complex_mul(total, gauss_sum_direct(n, ai, qi, prec, cap))
    return total


def g_d_prime(ctx: CandidateContext, prec: int = DEFAULT_PREC) -> GaussValue:
    """G_d(p) = max_y |1 + d sum_{x=1}^t e(g^(dx+y)/p)|  (coset method)."""
    d, t, p, g = ctx.d, ctx.t, ctx.p, ctx.g
    if d == 1:
        # the full character sum over F_p vanishes
        return GaussValue(CertReal.exact(0, prec), 1, "coset", d, p)
    # column j of the reshaped table holds the coset g^j * (d-th powers)
    cosets = _powers(g, p).reshape(t, d)
    sums = trig_column_sums(p, cosets, prec)
    best = None
    best_j = 0
    best_mid = -1.0
    for j, (re, im) in enumerate(sums):
        mag = cert_hypot(re * d + 1, im * d)
        best = mag if best is None else best.max(mag)
        if float(mag) > best_mid:
            best_mid, best_j = float(mag), j
    return GaussValue(best, pow(g, best_j, p), "coset", d, p)


def g_n_prime(n: int, p: int, prec: int = DEFAULT_PREC) -> GaussValue:
    """G_n(p) for a prime p; reduces to G_d(p) with d = gcd(n, p - 1)."""
    if n % p == 0 or p == 2:
        return g_prime_power(n, p, 1, prec)
    value = g_d_prime(CandidateContext.build(n, p), prec)
    return GaussValue(value.magnitude, value.argmax_a, value.method, n, p)


def unit_class_representatives(n: int, q: int) -> list[int]:
    """Smallest member of each coset of the n-th powers in (Z/q)^*."""
    values = powmod_array(np.arange(q, dtype=np.int64), n, q)
    units = np.gcd(np.arange(q), q) == 1
    subgroup = np.unique(values[units])
    uncovered = units.copy()
    reps = []
    while True:
        left = np.flatnonzero(uncovered)
        if not len(left):
            return reps
        a = int(left[0])
        reps.append(a)
        uncovered[a * subgroup % q] = False


def g_prime_power(n: int, p: int, m: int, prec: int = DEFAULT_PREC,
                  cap: int = DIRECT_CAP) -> GaussValue:
    """G_n(p^m) from the histogram of x**n mod p^m."""
    q = p ** m
    _check_cap(q, cap)
    values, counts = residue_histogram(n, q)
    best = None
    best_a, best_mid = 1, -1.0
    for a in unit_class_representatives(n, q):
        re, im = trig_sum(q, a * values % q, counts, prec=prec)
        mag = cert_hypot(re, im)
        best = mag if best is None else best.max(mag)
        if float(mag) > best_mid:
            best_mid, best_a = float(mag), a
    return GaussValue(best, best_a, "histogram", n, q)


def g_composite(n: int, q: int, prec: int = DEFAULT_PREC, direct: bool = False,
                cap: int = DIRECT_CAP) -> GaussValue:
    """G_n(q) = prod G_n(p^e) over p^e || q; the witness is assembled by CRT."""
    if q < 2:
        raise ValueError("need q >= 2")
    if direct:
        return _g_direct(n, q, prec, cap)
    fac = factorize(q)
    if len(fac) == 1:
        p, e = fac.factors[0]
        if e == 1:
            return g_n_prime(n, p, prec)
        return g_prime_power(n, p, e, prec, cap)
    magnitude = CertReal.exact(1, prec)
    residues, moduli = [], []
    for p, e in fac:
        qi = p ** e
        local = g_n_prime(n, p, prec) if e == 1 else g_prime_power(n, p, e, prec, cap)
        magnitude = magnitude * local.magnitude
        # a (q/q_i)^(n-1) = a_i (mod q_i)
        residues.append(local.argmax_a * pow(pow(q // qi, n - 1, qi), -1, qi) % qi)
        moduli.append(qi)
    return GaussValue(magnitude, crt(residues, moduli), "multiplicative", n, q)


def _g_direct(n: int, q: int, prec: int, cap: int) -> GaussValue:
    best = None
    best_a, best_mid = 1, -1.0
    for a in range(1, q):
        if math.gcd(a, q) != 1:
            continue
        mag = cert_hypot(*gauss_sum_direct(n, a, q, prec, cap))
        best = mag if best is None else best.max(mag)
        if float(mag) > best_mid:
            best_mid, best_a = float(mag), a
    return GaussValue(best, best_a, "direct", n, q)


def magnitude_at(n: int, a: int, q: int, prec: int = DEFAULT_PREC) -> CertReal:
    """|S_n(a, q)|, evaluated multiplicatively."""
    return cert_hypot(*gauss_sum(n, a, q, prec))
