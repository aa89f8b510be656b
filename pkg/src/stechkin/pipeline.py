"""A(n) = sup_q G_n(q) / q^(1-1/n) and the quantities built from it.

A(n) factors as A1(n) A2(n): A1 collects the prime powers p^m with p | n and
m <= v_p(n) + 2, A2 the primes p not dividing n, grouped by d = gcd(n, p-1).
Only finitely many p can contribute to A2, namely those where the
Cochrane-Pinner bound B(d, p) exceeds p^(1-1/n).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from flint import arb, fmpq

from .arith import divisors, factorize, is_prime, primes_up_to, primitive_root
from .bounds import candidate_primes, stechkin_threshold
from .gauss import (CandidateContext, g_composite, g_d_prime, g_n_prime, g_prime_power,
                    residue_histogram)
from .numeric import (DEFAULT_PREC, MAX_PREC, CertReal, Order, PrecisionExhausted,
                      Undecided, cert_compare, cert_e_fraction, cert_log, cert_root_power,
                      escalate, working_precision)
from .reference import REPORTED_A
from .store import GdCache

EXACT_N_MAX = 2000
COFFEE_T_MAX = 172
NICOLAS_ROBIN = fmpq(154, 100)


@dataclass(frozen=True)
class LocalFactor:
    """Contribution of one prime (power) to A1 or A2."""

    p: int
    m: int
    ratio: CertReal
    status: str  # "above", "below" or "tie" relative to 1

    @property
    def factor(self) -> CertReal:
        if self.status == "below":
            return CertReal.exact(1, self.ratio.prec)
        if self.status == "above":
            return self.ratio
        return self.ratio.max(1)


@dataclass
class AnResult:
    n: int
    A1: CertReal
    A2: CertReal
    A: CertReal
    witnesses: list[tuple[int, int, CertReal]] = field(default_factory=list)
    extreme_modulus: int | None = None
    surviving_pairs: list[tuple[int, int, CertReal]] = field(default_factory=list)
    ties: list[tuple[int, int]] = field(default_factory=list)


def _classify(ratio_at, prec: int, max_prec: int) -> tuple[CertReal, str]:
    """Compare ratio_at(prec) with 1, escalating precision on overlap.

    An overlap that survives max_prec is reported as a tie: the factor
    max(ratio, 1) still encloses the truth, but no witness is claimed.
    """
    last = None

    def decide(pr):
        nonlocal last
        last = ratio_at(pr)
        order = cert_compare(last, CertReal.exact(1, pr))
        if order is Order.UNDECIDED:
            raise Undecided("ratio against 1")
        return last, ("above" if order is Order.GREATER else "below")

    try:
        return escalate(decide, prec, max_prec)
    except PrecisionExhausted:
        return last, "tie"


def _product(values, prec: int) -> CertReal:
    out = CertReal.exact(1, prec)
    for v in values:
        out = out * v
    return out


def a1_local_factors(n: int, prec: int = DEFAULT_PREC, max_prec: int = MAX_PREC,
                     cap: int | None = None) -> list[LocalFactor]:
    """Per prime p | n: the best m <= v_p(n) + 2 and its ratio G_n(p^m) / p^(m(1-1/n))."""
    kwargs = {} if cap is None else {"cap": cap}
    out = []
    for p, v in factorize(n):
        def ratios(pr):
            return [g_prime_power(n, p, m, pr, **kwargs).magnitude
                    / cert_root_power(p, m * (n - 1), n, pr) for m in range(1, v + 3)]

        best_m = _best_index(ratios(prec)) + 1
        ratio, status = _classify(lambda pr: ratios(pr)[best_m - 1], prec, max_prec)
        out.append(LocalFactor(p, best_m, ratio, status))
    return out


def _best_index(ratios: list[CertReal]) -> int:
    """Index of the largest ratio; among maxima that overlap it, the smallest index."""
    best = max(range(len(ratios)), key=lambda j: float(ratios[j]))
    return next(i for i, r in enumerate(ratios) if r.overlaps(ratios[best]))


def compute_A1(n: int, prec: int = DEFAULT_PREC, max_prec: int = MAX_PREC,
               cap: int | None = None) -> tuple[CertReal, list[tuple[int, int, CertReal]]]:
    if n < 2:
        raise ValueError("n must be at least 2")
    local = a1_local_factors(n, prec, max_prec, cap)
    value = _product((f.factor for f in local), prec)
    return value, [(f.p, f.m, f.ratio) for f in local if f.status == "above"]


def _gd_value(d: int, p: int, prec: int, cache: GdCache) -> CertReal:
    return cache.get_or_compute(d, p, prec,
                                lambda: g_d_prime(CandidateContext(d, p, d, (p - 1) // d,
                                                                   primitive_root(p)), prec).magnitude)


def _gd_hex(args):
    d, p, prec = args
    ctx = CandidateContext(d, p, d, (p - 1) // d, primitive_root(p))
    return d, p, g_d_prime(ctx, prec).magnitude.mid_rad_hex(), prec


def prefill_cache(pairs, prec: int, cache: GdCache, jobs: int = 1) -> None:
    """Evaluate missing G_d(p) values, in worker processes when jobs > 1."""
    missing = sorted({(d, p) for d, p in pairs if cache.get(d, p, prec) is None})
    if jobs <= 1 or len(missing) < 2:
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        for d, p, (mid, rad), pr in pool.map(_gd_hex, [(d, p, prec) for d, p in missing],
                                             chunksize=4):
            cache.put(d, p, CertReal.from_hex(mid, rad, pr))


def a2_pairs(n: int, prec: int = DEFAULT_PREC) -> list[tuple[int, int]]:
    """All (d, p) entering A2(n), sorted."""
    return [(d, p) for d in divisors(n) if d >= 3 for p in candidate_primes(d, n, prec)]


def a2_local_factors(n: int, prec: int = DEFAULT_PREC, max_prec: int = MAX_PREC,
                     cache: GdCache | None = None, jobs: int = 1) -> list[tuple[int, LocalFactor]]:
    cache = cache if cache is not None else GdCache()
    pairs = a2_pairs(n, prec)
    prefill_cache(pairs, prec, cache, jobs)
    out = []
    for d, p in pairs:
        ratio, status = _classify(
            lambda pr: _gd_value(d, p, pr, cache) / stechkin_threshold(p, n, pr), prec, max_prec)
        out.append((d, LocalFactor(p, 1, ratio, status)))
    return out


def compute_A2(n: int, prec: int = DEFAULT_PREC, max_prec: int = MAX_PREC,
               cache: GdCache | None = None,
               jobs: int = 1) -> tuple[CertReal, list[tuple[int, int, CertReal]]]:
    if n < 2:
        raise ValueError("n must be at least 2")
    cache = cache if cache is not None else GdCache()
    local = a2_local_factors(n, prec, max_prec, cache, jobs)
    value = _product((f.factor for _, f in local), prec)
    surviving = [(d, f.p, f.ratio * stechkin_threshold(f.p, n, f.ratio.prec))
                 for d, f in local if f.status == "above"]
    return value, surviving


def compute_A(n: int, prec: int = DEFAULT_PREC, max_prec: int = MAX_PREC,
              cache: GdCache | None = None, n_max: int = EXACT_N_MAX, jobs: int = 1,
              cap: int | None = None) -> AnResult:
    """A(n) with its extreme modulus (the product of every contributing p^m)."""
    if n < 2 or n > n_max:
        raise ValueError(f"n must lie in [2, {n_max}]")
    cache = cache if cache is not None else GdCache()
    a1 = a1_local_factors(n, prec, max_prec, cap)
    a2 = a2_local_factors(n, prec, max_prec, cache, jobs)
    A1 = _product((f.factor for f in a1), prec)
    A2 = _product((f.factor for _, f in a2), prec)
    witnesses = [(f.p, f.m, f.ratio) for f in a1 if f.status == "above"]
    surviving = [(d, f.p, f.ratio * stechkin_threshold(f.p, n, f.ratio.prec))
                 for d, f in a2 if f.status == "above"]
    modulus = 1
    for p, m, _ in witnesses:
        modulus *= p ** m
    for _, p, _ in surviving:
        modulus *= p
    ties = [(f.p, f.m) for f in a1 if f.status == "tie"] + [(f.p, 1) for _, f in a2
                                                             if f.status == "tie"]
    return AnResult(n, A1, A2, A1 * A2, witnesses, modulus if modulus > 1 else None,
                    surviving, ties)


def witness_ratio(n: int, q: int, prec: int = DEFAULT_PREC) -> CertReal:
    """G_n(q) / q^(1-1/n), evaluated multiplicatively."""
    return g_composite(n, q, prec).magnitude / stechkin_threshold(q, n, prec)


# published values ---------------------------------------------------------

def reported_value(n: int) -> CertReal:
    """The published eight-decimal value of A(n) as an exact rational."""
    return CertReal.exact(fmpq(int(REPORTED_A[n].replace(".", "")), 10 ** 8))


def matches_reported(value: CertReal, n: int, tol=fmpq(2, 10 ** 8)) -> bool:
    """Certified |value - reported| <= tol."""
    diff = abs(value - reported_value(n))
    return cert_compare(diff, CertReal.exact(tol)) in (Order.LESS, Order.EQUAL)


def retained_modulus(n: int, prec: int = DEFAULT_PREC) -> int:
    """Product of the prime powers contributing to A1(n) and of every prime p
    not dividing n with d = gcd(n, p-1) >= 3, B(d, p) > p^(1-1/d) and
    G_d(p) > p^(1-1/d).

    The survival tests here use the exponent d rather than n, so primes with
    p^(1-1/d) < G_d(p) <= p^(1-1/n) are retained as well.  This is the rule
    that reproduces the published extreme moduli for every listed n.
    """
    modulus = 1
    for f in a1_local_factors(n, prec):
        if f.status == "above":
            modulus *= f.p ** f.m
    for d in divisors(n):
        if d < 3:
            continue
        for p in candidate_primes(d, d, prec):
            if n % p == 0 or math.gcd(n, p - 1) != d:
                continue
            g = g_d_prime(CandidateContext(d, p, d, (p - 1) // d, primitive_root(p)), prec).magnitude
            if cert_compare(g, stechkin_threshold(p, d, prec)) is Order.GREATER:
                modulus *= p
    return modulus


# upper bounds for large n -----------------------------------------------------

def coffee_log_sum(n: int, prec: int = DEFAULT_PREC) -> CertReal:
    """3 log n + sum over d | n, d >= 3, t <= 172 with dt + 1 prime of log(dt + 1)."""
    total = cert_log(n, prec) * 3
    for d in divisors(n):
        if d < 3:
            continue
        for t in range(1, COFFEE_T_MAX + 1):
            if is_prime(d * t + 1):
                total = total + cert_log(d * t + 1, prec)
    return total


def _tau(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


def upper_bound_A(n: int, mode: str = "coffee", prec: int = DEFAULT_PREC) -> CertReal:
    """Certified upper bound on A(n) for n >= 2000."""
    if n < EXACT_N_MAX:
        raise ValueError("the large-n bounds need n >= 2000")
    if mode == "coffee":
        return (coffee_log_sum(n, prec) / n).exp()
    if mode == "coffee2":
        log_bound = (cert_log(n, prec) * 3
                     + cert_log(COFFEE_T_MAX * n + 1, prec) * (COFFEE_T_MAX * _tau(n))) / n
        return log_bound.exp()
    raise ValueError(f"unknown mode {mode!r}")


def _nr_numerator(x: int, prec: int) -> CertReal:
    """3 log x + 172 T(x) log(172 x + 1), T(x) = 2^(1.54 log x / log log x) >= tau(x)."""
    with working_precision(prec):
        lx = arb(x).log()
        tau_bound = (arb(2).log() * arb(NICOLAS_ROBIN) * lx / lx.log()).exp()
        val = 3 * lx + COFFEE_T_MAX * tau_bound * arb(COFFEE_T_MAX * x + 1).log()
    return CertReal(val, prec)


def closed_form_holds(a: int, b: int, log_threshold: CertReal, prec: int = DEFAULT_PREC) -> bool:
    """Certified: log A(n) < log_threshold for every n in [a, b].

    Valid for a >= 16, where the numerator is increasing, so it is bounded on
    the block by its value at b while the denominator n is at least a.
    """
    if a < 16:
        raise ValueError("block must start at 16 or later")
    return cert_compare(_nr_numerator(b, prec) / a, log_threshold) is Order.LESS


def analytic_tail_holds(x: int, log_threshold: CertReal, prec: int = DEFAULT_PREC) -> bool:
    """Certified: the closed-form bound stays below the threshold for all n >= x.

    With c = 1.54 log 2 / log log x, T(n) <= n^c for n >= x, and the majorant
    3 log n / n + 172 n^(c-1) log(172 n + 1) is decreasing once log(172 n + 1)
    exceeds 1 / (1 - c) (and n > e); so its value at x bounds the whole tail.
    """
    with working_precision(prec):
        lx = arb(x).log()
        c = arb(2).log() * arb(NICOLAS_ROBIN) / lx.log()
        if not (c < 1) or not (lx > 1):
            return False
        l172 = arb(COFFEE_T_MAX * x + 1).log()
        if not (l172 > 1 / (1 - c)):
            return False
        g = 3 * lx / x + COFFEE_T_MAX * ((c - 1) * lx).exp() * l172
        return bool(g < log_threshold.ball)


@dataclass
class TailResult:
    threshold: float
    n_start: int
    N0: int
    blocks: int
    tail_from: int
    exceptions: list[int]
    screened: bool

    @property
    def verified_from(self) -> int:
        """Least N with A(n) < threshold certified for every n >= N (needs screening)."""
        if not self.screened:
            return self.N0
        return max(self.exceptions) + 1 if self.exceptions else self.n_start


def _float_nr_log(n: float) -> float:
    ln = math.log(n)
    return (3 * ln + COFFEE_T_MAX * 2 ** (1.54 * ln / math.log(ln)) * math.log(172 * n + 1)) / n


def minimal_closed_form_start(log_threshold: CertReal, n_start: int,
                              prec: int = DEFAULT_PREC) -> tuple[int, int, int]:
    """Least N0 >= n_start from which the closed form certifies the threshold.

    Returns (N0, number of blocks, start of the analytic tail).
    """
    lt = float(log_threshold)
    lo, hi = max(n_start, 16), max(n_start, 16)
    while _float_nr_log(hi) >= lt:
        hi *= 2
    # float bisection for the crossing, then certified adjustment
    while hi - lo > 1 and _float_nr_log(lo) >= lt:
        mid = (lo + hi) // 2
        if _float_nr_log(mid) < lt:
            hi = mid
        else:
            lo = mid
    n0 = lo if _float_nr_log(lo) < lt else hi
    while not closed_form_holds(n0, n0, log_threshold, prec):
        n0 += 1
    while n0 > max(n_start, 16) and closed_form_holds(n0 - 1, n0 - 1, log_threshold, prec):
        n0 -= 1

    tail = 1 << max(n0.bit_length(), 5)
    while not analytic_tail_holds(tail, log_threshold, prec):
        tail *= 2
    a, step, blocks = n0, 1, 0
    while a < tail:
        b = min(a + step - 1, tail)
        if closed_form_holds(a, b, log_threshold, prec):
            blocks += 1
            a, step = b + 1, step * 2
        elif step > 1:
            step //= 2
        else:
            raise ArithmeticError(f"closed form fails to certify n = {a}")
    return n0, blocks, tail


def coffee_screen(n_lo: int, n_hi: int, log_threshold: CertReal,
                  prec: int = DEFAULT_PREC, rel_margin: float = 1e-9) -> list[int]:
    """n in [n_lo, n_hi) whose coffee bound is not below the threshold.

    A floating-point pass with a generous relative margin finds candidates;
    each is then decided by the certified bound, and an undecided comparison
    counts as an exception.
    """
    if n_hi <= n_lo:
        return []
    top = COFFEE_T_MAX * (n_hi - 1) + 1
    sieve = np.zeros(top + 1, dtype=bool)
    sieve[primes_up_to(top)] = True
    dvals = np.arange(n_hi, dtype=np.int64)
    ldiv = np.zeros(n_hi, dtype=np.float64)
    for t in range(1, COFFEE_T_MAX + 1):
        vals = dvals * t + 1
        ldiv += np.where(sieve[vals], np.log(vals.astype(np.float64)), 0.0)
    del sieve
    acc = np.zeros(n_hi, dtype=np.float64)
    for d in range(3, n_hi):
        acc[d::d] += ldiv[d]
    ns = np.arange(n_lo, n_hi)
    logs = (3 * np.log(ns.astype(np.float64)) + acc[n_lo:n_hi]) / ns
    lt = float(log_threshold.lower())
    flagged = ns[logs * (1 + rel_margin) >= lt]
    out = []
    for n in flagged:
        n = int(n)
        order = cert_compare(coffee_log_sum(n, prec) / n, log_threshold)
        if order is not Order.LESS:
            out.append(n)
    return out


def global_tail_bound(threshold=fmpq(47, 10), n_start: int = EXACT_N_MAX,
                      screen: bool = True, prec: int = DEFAULT_PREC) -> TailResult:
    """Certify A(n) < threshold for n >= N0 and list the n in [n_start, N0)
    where the coffee bound fails to do so."""
    if isinstance(threshold, CertReal):
        thr = threshold
    elif isinstance(threshold, (int, fmpq)):
        thr = CertReal.exact(fmpq(threshold), prec)
    else:
        frac = Fraction(str(threshold))
        thr = CertReal.exact(fmpq(frac.numerator, frac.denominator), prec)
    log_thr = thr.log()
    n0, blocks, tail = minimal_closed_form_start(log_thr, n_start, prec)
    exceptions = coffee_screen(n_start, n0, log_thr, prec) if screen else []
    return TailResult(float(thr), n_start, n0, blocks, tail, exceptions, screen)


# E_2 series and the lower-bound witnesses ------------------------------------------

@dataclass(frozen=True)
class E2Row:
    N: int
    E2: CertReal
    scaled: dict


def e2_series(N_max: int, cs=(), prec: int = DEFAULT_PREC, cache: GdCache | None = None,
              n_max: int = EXACT_N_MAX, jobs: int = 1, progress=None) -> list[E2Row]:
    """Partial sums E_2(N) = sum_{n=2}^N (A_2(n) - 1) for 2 <= N <= N_max."""
    if N_max < 2 or N_max > n_max:
        raise ValueError(f"N_max must lie in [2, {n_max}]")
    cache = cache if cache is not None else GdCache()
    total = CertReal.exact(0, prec)
    rows = []
    for n in range(2, N_max + 1):
        a2, _ = compute_A2(n, prec, cache=cache, jobs=jobs)
        total = total + (a2 - 1)
        scaled = {}
        with working_precision(prec):
            log_n = arb(n).log()
            for c in cs:
                frac = Fraction(str(c))
                scaled[c] = CertReal(total.ball / log_n ** arb(fmpq(frac.numerator, frac.denominator)),
                                     prec)
        rows.append(E2Row(n, total, scaled))
        if progress:
            progress(n, N_max)
    return rows


def e_lower_witness(p: int, prec: int = DEFAULT_PREC, max_prec: int = MAX_PREC) -> bool:
    """Check G_n(p) >= 1 + (p-1) cos(2 pi/p) for n = (p-1)/2.

    For this n the values x^n are 0 once and +1, -1 (p-1)/2 times each, so
    S_n(1, p) = 1 + (p-1) cos(2 pi/p) exactly; the histogram is verified in
    integers and the computed maximum must not fall below that value.
    """
    if p < 5 or not is_prime(p):
        raise ValueError("p must be a prime >= 5")
    n = (p - 1) // 2
    values, counts = residue_histogram(n, p)
    hist = dict(zip(values.tolist(), counts.tolist()))
    if hist != {0: 1, 1: n, p - 1: n}:
        return False

    def decide(pr):
        g = g_n_prime(n, p, pr).magnitude
        cos, _ = cert_e_fraction(1, p, pr)
        rhs = cos * (p - 1) + 1
        return cert_compare(g, rhs) is not Order.LESS

    return decide(prec) or decide(max_prec)
