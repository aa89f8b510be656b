"""Lattice-based pruning of candidate pairs (d, p).

Each check here certifies G_d(p) <= p^(1-1/n) for a pair without evaluating
the exponential sum.  The sums of squared centered residues that drive the
tests are exact integers; only their thresholds are real, and those are
rounded up before comparing.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path

import numpy as np
from flint import arb, fmpq

from .arith import divisors, euler_phi, is_prime, power_table, primes_up_to, primitive_root
from .bounds import cochrane_pinner, lam, stechkin_threshold
from .gauss import CandidateContext, g_d_prime
from .numeric import (DEFAULT_PREC, MAX_PREC, CertReal, Order, Undecided,
                      cert_compare, cert_log, cert_root_power, escalate,
                      working_precision)
from .store import load_checkpoint, save_checkpoint

# gamma_k^k for the dimensions where the Hermite constant is known exactly
_EXACT_GAMMA_POWER = {
    1: fmpq(1), 2: fmpq(4, 3), 3: fmpq(2), 4: fmpq(4), 5: fmpq(8),
    6: fmpq(64, 3), 7: fmpq(64), 8: fmpq(256), 24: fmpq(4) ** 24,
}

# upper bounds on gamma_k from the Cohn-Elkies linear programming bound
COHN_ELKIES_UPPER = {29: fmpq(390553, 100000)}

# the corollaries' fixed products Theta * K_r, free of gamma
COROLLARY_THETA_K = {"scissors": fmpq(112, 29), "string": fmpq(224, 29), "cord": fmpq(520, 11)}
COROLLARY_RANK = {"scissors": 25, "string": 25, "cord": 9}
COROLLARY_P_FLOOR = {"scissors": 375000, "string": 6500, "cord": 8000}
COROLLARY_PHI_FLOOR = {"scissors": 25, "string": 25, "cord": 10}

N_FLOOR = 2000
BEAR_P_FLOOR = 8_500_000
BEAR_T_FLOOR = 173
FOX_T_RANGE = (173, 636)
FOX_DIRECT_BELOW = 6500
FOX_SCISSORS_FROM = 375000


def f_least(r: int) -> int:
    """The least m with phi(m) >= r."""
    if r < 1:
        raise ValueError("r must be positive")
    m = 1
    while euler_phi(m) < r:
        m += 1
    return m


def minkowski_hlawka_lower(k: int, prec: int = DEFAULT_PREC) -> CertReal:
    """(1/pi) (2 zeta(k) Gamma(1 + k/2))^(2/k), a lower bound for gamma_k."""
    if k < 2:
        raise ValueError("needs k >= 2")
    with working_precision(prec):
        inner = 2 * arb(k).zeta() * (arb(k) / 2 + 1).gamma()
        return CertReal((inner.log() * 2 / k).exp() / arb.pi(), prec)


def blichfeldt_upper(k: int, prec: int = DEFAULT_PREC) -> CertReal:
    """(2/pi) Gamma(2 + k/2)^(2/k), an upper bound for gamma_k."""
    with working_precision(prec):
        g = (arb(k) / 2 + 2).gamma()
        return CertReal((g.log() * 2 / k).exp() * 2 / arb.pi(), prec)


def hermite_bounds(k: int, prec: int = DEFAULT_PREC) -> tuple[CertReal, CertReal]:
    """Certified (lower, upper) bounds for the Hermite constant gamma_k."""
    if k in _EXACT_GAMMA_POWER:
        with working_precision(prec):
            g = CertReal((arb(_EXACT_GAMMA_POWER[k]).log() / k).exp(), prec)
        return g, g
    lo = CertReal.exact(minkowski_hlawka_lower(k, prec).lower(), prec)
    hi = CertReal.exact(blichfeldt_upper(k, prec).upper(), prec)
    if k in COHN_ELKIES_UPPER:
        # a ball around the exact decimal bound, so the tabulated value itself is enclosed
        table = CertReal.exact(COHN_ELKIES_UPPER[k], prec)
        if cert_compare(table, hi) is Order.LESS:
            hi = table
    return lo, hi


@dataclass(frozen=True)
class HermiteData:
    r: int
    gamma_lo: CertReal
    gamma_hi: CertReal
    C_lo: CertReal
    C_hi: CertReal
    f: int
    K_lo: CertReal
    K_hi: CertReal

    @classmethod
    def from_gamma(cls, r: int, gamma_lo: CertReal, gamma_hi: CertReal,
                   prec: int = DEFAULT_PREC) -> "HermiteData":
        """C_r is decreasing in gamma: gamma_hi gives C_lo and gamma_lo gives C_hi."""
        f = f_least(r)

        def c_of(gamma: CertReal) -> CertReal:
            # (r gamma^(r-1))^(-1/r)
            return ((gamma.log() * (r - 1) + cert_log(r, prec)) * fmpq(-1, r)).exp()

        c_lo, c_hi = c_of(gamma_hi), c_of(gamma_lo)
        scale = fmpq(4) * (1 - fmpq(1, f))
        return cls(r, gamma_lo, gamma_hi, c_lo, c_hi, f, c_lo * scale, c_hi * scale)

    def swapped(self) -> "HermiteData":
        """The same data with the gamma bounds exchanged (unsound; for fault tests)."""
        return HermiteData.from_gamma(self.r, self.gamma_hi, self.gamma_lo, self.gamma_lo.prec)


@lru_cache(maxsize=64)
def hermite_data(r: int, prec: int = DEFAULT_PREC) -> HermiteData:
    """Certified Hermite data for rank r (needs bounds on gamma_(r-1))."""
    if r < 2:
        raise ValueError("rank must be at least 2")
    lo, hi = hermite_bounds(r - 1, prec)
    return HermiteData.from_gamma(r, lo, hi, prec)


def _p_t_power(p: int, t: int, r: int, prec: int) -> CertReal:
    """p^(2-2/r) t^(1/r)."""
    return cert_root_power(p, 2 * r - 2, r, prec) * cert_root_power(t, 1, r, prec)


def f_r_threshold(r: int, t: int, p: int, prec: int = DEFAULT_PREC,
                  hermite: HermiteData | None = None) -> CertReal:
    """Enclosure of F_r(t, p) = C_r p^(2-2/r) t^(1/r) over the C_r enclosure."""
    hd = hermite or hermite_data(r, prec)
    base = _p_t_power(p, t, r, prec)
    lo, hi = hd.C_lo * base, hd.C_hi * base
    return CertReal.hull(lo.lower(), hi.upper(), prec)


@dataclass(frozen=True)
class PruneVerdict:
    pruned: bool
    criterion: str
    witness_y: int | None = None
    work: int = 0
    applicable: bool = True
    reason: str = ""


@dataclass(frozen=True)
class ThetaOutcome:
    passed: bool
    threshold: int
    work: int
    witness_y: int | None = None
    witness_sum: int | None = None


@lru_cache(maxsize=8)
def _squared_centered(g: int, p: int) -> np.ndarray:
    """sq[k] = [[g^k]]_p^2 for 0 <= k < p - 1."""
    pw = power_table(g, p)
    centered = np.where(2 * pw > p, pw - p, pw)
    return centered * centered


def theta_sum_test(ctx: CandidateContext, rhs: CertReal, block: int = 64) -> ThetaOutcome:
    """Check sum_{x=1}^t [[g^(dx+y)]]_p^2 >= rhs for every y in 1..d.

    Per class the running sum stops at the first term where it reaches the
    integer ceiling of rhs; classes are visited in order y = 1..d and the
    test stops at the first class that never reaches it.
    """
    threshold = max(rhs.ceil_int(), 0)
    d, t, p = ctx.d, ctx.t, ctx.p
    if t * (p // 2) ** 2 >= 2 ** 62:
        return theta_sum_test_reference(ctx, rhs)
    sq = _squared_centered(ctx.g, p)
    # row x-1, column y-1 holds the exponent d x + y (mod p - 1)
    grid = np.roll(sq, -(d + 1)).reshape(t, d)
    consumed = np.full(d, t, dtype=np.int64)
    done = np.zeros(d, dtype=bool)
    running = np.zeros(d, dtype=np.int64)
    row = 0
    while row < t and not done.all():
        live = np.flatnonzero(~done)
        chunk = np.cumsum(grid[row:row + block, live], axis=0) + running[live]
        hit = chunk >= threshold
        reached = hit.any(axis=0)
        first = hit.argmax(axis=0)
        consumed[live[reached]] = row + first[reached] + 1
        done[live[reached]] = True
        running[live] = chunk[-1]
        row += block
    if done.all():
        return ThetaOutcome(True, threshold, int(consumed.sum()))
    y = int(np.flatnonzero(~done)[0])
    return ThetaOutcome(False, threshold, int(consumed[:y + 1].sum()), y + 1,
                        int(grid[:, y].sum()))


def theta_sum_test_reference(ctx: CandidateContext, rhs: CertReal) -> ThetaOutcome:
    """Plain-integer version of :func:`theta_sum_test`."""
    threshold = max(rhs.ceil_int(), 0)
    d, t, p, g = ctx.d, ctx.t, ctx.p, ctx.g
    work = 0
    for y in range(1, d + 1):
        total = 0
        for x in range(1, t + 1):
            r = pow(g, d * x + y, p)
            if 2 * r > p:
                r -= p
            total += r * r
            work += 1
            if total >= threshold:
                break
        else:
            return ThetaOutcome(False, threshold, work, y, total)
    return ThetaOutcome(True, threshold, work)


def class_square_sums(ctx: CandidateContext) -> list[int]:
    """Full sums sum_{x=1}^t [[g^(dx+y)]]_p^2 for y = 1..d, in Python integers."""
    d, t, p, g = ctx.d, ctx.t, ctx.p, ctx.g
    out = []
    for y in range(1, d + 1):
        total = 0
        for x in range(1, t + 1):
            r = pow(g, d * x + y, p)
            r = r - p if 2 * r > p else r
            total += r * r
        out.append(total)
    return out


def pbound_rhs(p: int, r: int, theta_k, prec: int = DEFAULT_PREC) -> CertReal:
    """1 + lam (p^5 log p / (Theta K_r (p-1)^(1/r)))^(3r/(16r-8))."""
    if not isinstance(theta_k, CertReal):
        theta_k = CertReal.exact(theta_k, prec)
    base = cert_root_power(p, 5, 1, prec) * cert_log(p, prec) / (
        theta_k * cert_root_power(p - 1, 1, r, prec))
    return lam(prec) * (base.log() * fmpq(3 * r, 16 * r - 8)).exp() + 1


def _holds(lhs_fn, rhs_fn, prec: int, max_prec: int) -> bool:
    """Certified lhs >= rhs with escalation; False when certifiably below or
    still undecided at max_prec (never claims what it cannot prove)."""

    def decide(pr):
        order = cert_compare(lhs_fn(pr), rhs_fn(pr))
        if order is Order.UNDECIDED:
            raise Undecided("near tie")
        return order is not Order.LESS

    try:
        return escalate(decide, prec, max_prec)
    except ArithmeticError:
        return False


def pbound_holds(n: int, p: int, r: int, theta_k, prec: int = DEFAULT_PREC,
                 max_prec: int = MAX_PREC) -> bool:
    """Certified p^(1-1/n) >= pbound_rhs; theta_k may be a rational or an enclosure
    (every member of the enclosure must satisfy the inequality)."""
    return _holds(lambda pr: stechkin_threshold(p, n, pr),
                  lambda pr: pbound_rhs(p, r, theta_k, pr), prec, max_prec)


def corollary_rhs(kind: str, t: int, p: int, prec: int = DEFAULT_PREC) -> CertReal:
    if kind == "scissors":
        return cert_root_power(p, 48, 25, prec) * cert_root_power(t, 1, 25, prec)
    if kind == "string":
        return cert_root_power(p, 48, 25, prec) * cert_root_power(t, 1, 25, prec) * 2
    if kind == "cord":
        return cert_root_power(p, 16, 9, prec) * cert_root_power(t, 1, 9, prec) * 13
    raise ValueError(f"unknown corollary {kind!r}")


def _not_applicable(criterion: str, reason: str) -> PruneVerdict:
    return PruneVerdict(False, criterion, applicable=False, reason=reason)


def run_corollary(kind: str, ctx: CandidateContext, threshold_n: int,
                  prec: int = DEFAULT_PREC) -> PruneVerdict:
    """The corollary test on a given context, with the pbound inequality taken at
    exponent threshold_n (n = 2000 covers every n >= 2000)."""
    if kind not in COROLLARY_THETA_K:
        raise ValueError(f"unknown corollary {kind!r}")
    if threshold_n < N_FLOOR:
        return _not_applicable(kind, f"n < {N_FLOOR}")
    if ctx.p < COROLLARY_P_FLOOR[kind]:
        return _not_applicable(kind, f"p < {COROLLARY_P_FLOOR[kind]}")
    if euler_phi(ctx.t) < COROLLARY_PHI_FLOOR[kind]:
        return _not_applicable(kind, f"phi(t) < {COROLLARY_PHI_FLOOR[kind]}")
    if not pbound_holds(threshold_n, ctx.p, COROLLARY_RANK[kind], COROLLARY_THETA_K[kind], prec):
        return PruneVerdict(False, kind, reason="pbound fails")
    out = theta_sum_test(ctx, corollary_rhs(kind, ctx.t, ctx.p, prec))
    if not out.passed:
        return PruneVerdict(False, kind, out.witness_y, out.work, reason="sum below threshold")
    return PruneVerdict(True, kind, None, out.work)


def corollary_check(kind: str, n: int, p: int, prec: int = DEFAULT_PREC) -> PruneVerdict:
    """Corollary test ('scissors', 'string' or 'cord') for the pair (n, p)."""
    if kind not in COROLLARY_THETA_K:
        raise ValueError(f"unknown corollary {kind!r}")
    if n < N_FLOOR:
        return _not_applicable(kind, f"n < {N_FLOOR}")
    if p < COROLLARY_P_FLOOR[kind]:
        return _not_applicable(kind, f"p < {COROLLARY_P_FLOOR[kind]}")
    return run_corollary(kind, CandidateContext.build(n, p), n, prec)


def prop1_check(n: int, p: int, r: int, theta, prec: int = DEFAULT_PREC,
                hermite: HermiteData | None = None) -> PruneVerdict:
    """General Theta-sum criterion with rank r and weight theta >= 1."""
    hd = hermite or hermite_data(r, prec)
    theta = theta if isinstance(theta, CertReal) else CertReal.exact(theta, prec)
    if cert_compare(theta, CertReal.exact(1, prec)) is Order.LESS:
        raise ValueError("theta must be at least 1")
    ctx = CandidateContext.build(n, p)
    if euler_phi(ctx.t) < r:
        return _not_applicable("prop1", f"phi(t) < {r}")
    theta_k = theta * hd.K_lo
    if not _holds(lambda pr: stechkin_threshold(p, n, pr),
                  lambda pr: pbound_rhs(p, r, theta_k, pr), prec, prec):
        return PruneVerdict(False, "prop1", reason="pbound fails")
    rhs = theta * hd.C_hi * _p_t_power(p, ctx.t, r, prec)
    out = theta_sum_test(ctx, rhs)
    if not out.passed:
        return PruneVerdict(False, "prop1", out.witness_y, out.work, reason="sum below threshold")
    return PruneVerdict(True, "prop1", None, out.work)


def prop2_check(n: int, p: int, r: int, prec: int = DEFAULT_PREC,
                hermite: HermiteData | None = None, t: int | None = None) -> PruneVerdict:
    """Sum-free criterion: phi(t) >= r, p^(2/r) t^(1-1/r) > 32 r C_r and the
    pbound inequality with Theta K_r replaced by 2 K_r."""
    hd = hermite or hermite_data(r, prec)
    if t is None:
        t = (p - 1) // math.gcd(n, p - 1)
    if euler_phi(t) < r:
        return _not_applicable("prop2", f"phi(t) < {r}")
    lhs = cert_root_power(p, 2, r, prec) * cert_root_power(t, r - 1, r, prec)
    if cert_compare(lhs, hd.C_hi * (32 * r)) is not Order.GREATER:
        return PruneVerdict(False, "prop2", reason="tbound fails")
    if not _holds(lambda pr: stechkin_threshold(p, n, pr),
                  lambda pr: pbound_rhs(p, r, hd.K_lo * 2, pr), prec, prec):
        return PruneVerdict(False, "prop2", reason="pbound fails")
    return PruneVerdict(True, "prop2")


def bear_check(n: int, p: int, t: int | None = None, prec: int = DEFAULT_PREC,
               hermite: HermiteData | None = None) -> PruneVerdict:
    """Rank-30 sum-free criterion for n >= 2000, p >= 8.5e6, t >= 173."""
    if n < N_FLOOR:
        return _not_applicable("bear", f"n < {N_FLOOR}")
    if t is not None and t < BEAR_T_FLOOR:
        return _not_applicable("bear", f"t < {BEAR_T_FLOOR}")
    if p < BEAR_P_FLOOR:
        return _not_applicable("bear", f"p < {BEAR_P_FLOOR}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    actual = (p - 1) // math.gcd(n, p - 1)
    if t is not None and t != actual:
        raise ValueError(f"t = {t} does not match (p-1)/gcd(n, p-1) = {actual}")
    if actual < BEAR_T_FLOOR:
        return _not_applicable("bear", f"t < {BEAR_T_FLOOR}")
    v = prop2_check(n, p, 30, prec, hermite, actual)
    return replace(v, criterion="bear")


def cosine_defect_bound(b_list, p: int, quarter: bool = False,
                        prec: int = DEFAULT_PREC) -> CertReal:
    """Upper bound m - 8C/p^2 (or m - 16C/p^2) for Re sum e(b_j/p), C = sum b_j^2."""
    limit = fmpq(p, 4 if quarter else 2)
    total = 0
    for b in b_list:
        if not abs(fmpq(b)) < limit:
            raise ValueError(f"|{b}| is not below {limit}")
        total += fmpq(b) ** 2
    m = len(b_list)
    return CertReal.exact(m - (16 if quarter else 8) * total / fmpq(p) ** 2, prec)


def cp_bound_check(d: int, p: int, n: int = N_FLOOR, prec: int = DEFAULT_PREC,
                   max_prec: int = MAX_PREC) -> PruneVerdict:
    """B(d, p) <= p^(1-1/n), which bounds G_d(p) outright."""
    ok = _holds(lambda pr: stechkin_threshold(p, n, pr),
                lambda pr: cochrane_pinner(d, p, pr).value, prec, max_prec)
    return PruneVerdict(ok, "cp-bound", reason="" if ok else "B(d,p) too large")


def direct_check(d: int, p: int, n: int = N_FLOOR, prec: int = DEFAULT_PREC,
                 max_prec: int = MAX_PREC) -> PruneVerdict:
    """Evaluate G_d(p) and compare with p^(1-1/n)."""
    ctx = context_for(d, p)
    ok = _holds(lambda pr: stechkin_threshold(p, n, pr),
                lambda pr: g_d_prime(ctx, pr).magnitude, prec, max_prec)
    return PruneVerdict(ok, "direct", work=p - 1, reason="" if ok else "G_d(p) too large")


def representative_n(d: int, p: int, floor: int = N_FLOOR) -> int:
    """The least n >= floor with gcd(n, p-1) = d."""
    t = (p - 1) // d
    k = -(-floor // d)
    while math.gcd(k, t) != 1:
        k += 1
    return d * k


def context_for(d: int, p: int) -> CandidateContext:
    """Context for the pair (d, p) itself; n = d has gcd(n, p-1) = d."""
    return CandidateContext(d, p, d, (p - 1) // d, primitive_root(p))


# the scan -------------------------------------------------------------------

@dataclass(frozen=True)
class ScanRow:
    p: int
    t: int
    d: int
    criterion: str
    verdict: str
    work: int

    def as_tuple(self):
        return (self.p, self.t, self.d, self.criterion, self.verdict, self.work)


@dataclass
class ScanReport:
    p_max: int
    t_range: tuple[int, int]
    rows: list[ScanRow] = field(default_factory=list)
    unresolved: list[ScanRow] = field(default_factory=list)

    @property
    def failures(self) -> list[ScanRow]:
        return [r for r in self.rows if r.verdict == "FAIL"]

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for r in self.rows:
            key = f"{r.criterion}:{r.verdict}"
            out[key] = out.get(key, 0) + 1
        return dict(sorted(out.items()))


SCAN_HEADER = ("p", "t", "d", "criterion", "verdict", "work")


def scan_prime(p: int, t_lo: int = FOX_T_RANGE[0], t_hi: int = FOX_T_RANGE[1],
               prec: int = DEFAULT_PREC) -> tuple[list[ScanRow], list[ScanRow]]:
    """Rows for every t | p-1 with t >= t_lo, and the pairs no criterion settled."""
    rows, unresolved = [], []
    for t in divisors(p - 1):
        if t < t_lo:
            continue
        d = (p - 1) // t
        if t > t_hi:
            verdict = cp_bound_check(d, p, N_FLOOR, prec)
        elif p < FOX_DIRECT_BELOW:
            verdict = None
        else:
            kind = "scissors" if p >= FOX_SCISSORS_FROM else "string"
            verdict = run_corollary(kind, context_for(d, p), N_FLOOR, prec)
        if verdict is not None and verdict.pruned:
            rows.append(ScanRow(p, t, d, verdict.criterion, "pruned", verdict.work))
            continue
        if verdict is not None:
            unresolved.append(ScanRow(p, t, d, verdict.criterion, "unresolved", verdict.work))
        direct = direct_check(d, p, N_FLOOR, prec)
        rows.append(ScanRow(p, t, d, "direct", "direct-ok" if direct.pruned else "FAIL", direct.work))
    return rows, unresolved


def _scan_chunk(args) -> tuple[list[ScanRow], list[ScanRow]]:
    primes, t_lo, t_hi, prec = args
    rows, unresolved = [], []
    for p in primes:
        r, u = scan_prime(int(p), t_lo, t_hi, prec)
        rows.extend(r)
        unresolved.extend(u)
    return rows, unresolved


def fox_scan(p_max: int | None = None, t_range: tuple[int, int] = FOX_T_RANGE,
             mode: str = "reduced", jobs: int = 1, prec: int = DEFAULT_PREC,
             report_path=None, checkpoint_path=None, checkpoint_every: int = 10_000,
             progress=None) -> ScanReport:
    """Verify G_d(p) <= p^(1-1/n) for all n >= 2000, primes p <= p_max and
    t = (p-1)/d >= t_range[0].

    With a checkpoint path the scan resumes after the last completed block;
    the report CSV then holds every row from earlier sessions as well.
    """
    if mode not in ("reduced", "full"):
        raise ValueError(f"unknown mode {mode!r}")
    if p_max is None:
        p_max = 10 ** 5 if mode == "reduced" else BEAR_P_FLOOR
    if p_max > BEAR_P_FLOOR:
        raise ValueError("p_max may not exceed 8.5e6")
    t_lo, t_hi = t_range
    report = ScanReport(p_max, (t_lo, t_hi))
    # only primes with p - 1 >= t_lo have a divisor t >= t_lo
    primes = [int(p) for p in primes_up_to(p_max) if p > 2 and p - 1 >= t_lo]
    params = {"p_max": p_max, "t_range": [t_lo, t_hi], "mode": mode, "prec": prec}

    start = 0
    if checkpoint_path:
        state = load_checkpoint(checkpoint_path)
        if state and state.get("params") == params:
            start = state["primes_done"]
            if report_path:
                prior = read_scan_report(report_path)
                report.rows = prior[:state["rows_written"]]
                report.unresolved = [ScanRow(**u) for u in state.get("unresolved", [])]
    if report_path and start == 0:
        _write_rows(report_path, [], truncate=True)

    blocks = [primes[i:i + checkpoint_every] for i in range(start, len(primes), checkpoint_every)]
    pool = ProcessPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        done = start
        for block in blocks:
            if pool:
                size = max(1, len(block) // (4 * jobs))
                parts = [(block[i:i + size], t_lo, t_hi, prec) for i in range(0, len(block), size)]
                results = list(pool.map(_scan_chunk, parts))
            else:
                results = [_scan_chunk((block, t_lo, t_hi, prec))]
            new_rows = [r for rows, _ in results for r in rows]
            report.rows.extend(new_rows)
            report.unresolved.extend(u for _, un in results for u in un)
            done += len(block)
            if report_path:
                _write_rows(report_path, new_rows)
            if checkpoint_path:
                save_checkpoint(checkpoint_path, {
                    "params": params, "primes_done": done, "last_prime": block[-1],
                    "rows_written": len(report.rows),
                    "unresolved": [u.__dict__ for u in report.unresolved],
                })
            if progress:
                progress(done, len(primes))
    finally:
        if pool:
            pool.shutdown()
    return report


def _write_rows(path, rows: list[ScanRow], truncate: bool = False) -> None:
    path = Path(path)
    if truncate or not path.exists():
        with path.open("w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(SCAN_HEADER)
    if rows:
        with path.open("a", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            for r in rows:
                w.writerow(r.as_tuple())
            fh.flush()
            os.fsync(fh.fileno())


def read_scan_report(path) -> list[ScanRow]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [ScanRow(int(r["p"]), int(r["t"]), int(r["d"]), r["criterion"],
                        r["verdict"], int(r["work"])) for r in reader]
