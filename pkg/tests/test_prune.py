import math
import random

import mpmath
import numpy as np
import pytest
from flint import fmpq

from stechkin.arith import euler_phi, is_prime, primes_up_to
from stechkin.gauss import CandidateContext, g_d_prime
from stechkin.numeric import CertReal, cert_root_power, certainly_le, trig_sum
from stechkin.prune import (COROLLARY_THETA_K, bear_check, class_square_sums, context_for,
                            corollary_check, corollary_rhs, cosine_defect_bound, cp_bound_check,
                            direct_check, f_least, f_r_threshold, fox_scan, hermite_bounds,
                            hermite_data, pbound_holds, prop1_check, prop2_check,
                            read_scan_report, representative_n, run_corollary, scan_prime,
                            theta_sum_test, theta_sum_test_reference)

from test_numeric import encloses


def test_f_least():
    assert [f_least(r) for r in (1, 2, 9, 25, 30)] == [1, 3, 11, 29, 31]
    for r in range(1, 60):
        f = f_least(r)
        assert euler_phi(f) >= r and all(euler_phi(m) < r for m in range(1, f))


def test_rank_25_constants():
    hd = hermite_data(25)
    assert hd.gamma_lo.contains(4) and hd.gamma_hi.contains(4)
    c = mpmath.power(5 * 2 ** 24, mpmath.mpf(-2) / 25)
    assert encloses(hd.C_lo, c) and encloses(hd.C_hi, c)
    assert abs(float(hd.C_lo) - 0.2323297) < 1e-7
    assert hd.f == 29
    assert encloses(hd.K_lo, c * mpmath.mpf(112) / 29)
    assert (hd.K_lo / hd.C_lo).contains(CertReal.exact(fmpq(112, 29)))


def test_rank_9_constants():
    hd = hermite_data(9)
    c = mpmath.power(48, mpmath.mpf(-2) / 9)
    assert encloses(hd.C_hi, c) and hd.f == 11
    assert encloses(hd.K_hi, c * mpmath.mpf(40) / 11)


def test_gamma_29_bounds():
    lo, hi = hermite_bounds(29)
    assert float(lo.lower()) > 2.08174 and float(lo.lower()) < 2.0818
    assert float(hi.upper()) <= 3.90553 + 1e-12
    hd = hermite_data(30)
    assert certainly_le(hd.C_lo, hd.C_hi)


def test_exact_hermite_values():
    for k, g in [(1, 1), (2, mpmath.sqrt(mpmath.mpf(4) / 3)), (8, 2), (24, 4)]:
        lo, hi = hermite_bounds(k)
        assert encloses(lo, g) and encloses(hi, g)


def test_minkowski_below_blichfeldt():
    for k in (9, 12, 20, 29, 40):
        lo, hi = hermite_bounds(k)
        assert certainly_le(lo, hi)


def test_f_r_forms_agree():
    r, t, p = 9, 100, 10007
    hd = hermite_data(r)
    direct = cert_root_power(p, 2 * (r - 1), 1) * t / (hd.gamma_lo ** (r - 1) * r)
    direct = (direct.log() / r).exp()
    assert f_r_threshold(r, t, p).overlaps(direct)
    value = f_r_threshold(25, 173, 375001)
    assert 0 < float(value) < 375001 ** 2
    assert f_r_threshold(25, 1, 1009).overlaps(hermite_data(25).C_lo * cert_root_power(1009, 48, 25))


def test_theta_example():
    ctx = CandidateContext(2, 7, 2, 3, 3)
    assert class_square_sums(ctx)[0] == 14
    out = theta_sum_test(ctx, CertReal.exact(0))
    assert out.passed and out.work == 2
    too_big = CertReal.exact(3 * 9 // 4 * 10)
    out = theta_sum_test(ctx, too_big)
    assert not out.passed and out.witness_y == 1 and out.witness_sum == 14


def test_theta_rhs_rounds_up():
    ctx = CandidateContext(2, 7, 2, 3, 3)
    assert theta_sum_test(ctx, CertReal.exact(14)).passed
    assert not theta_sum_test(ctx, CertReal.exact(fmpq(141, 10))).passed


def test_early_exit_matches_full_sums():
    """Early exit and blocking never change the verdict (10^3 random cases)."""
    rng = random.Random(11)
    primes = [int(p) for p in primes_up_to(4000) if p > 100]
    for _ in range(1000):
        p = rng.choice(primes)
        ds = [d for d in range(2, 60) if (p - 1) % d == 0]
        if not ds:
            continue
        d = rng.choice(ds)
        ctx = context_for(d, p)
        sums = class_square_sums(ctx)
        rhs_int = rng.randint(0, max(sums) + 10)
        rhs = CertReal.exact(fmpq(rhs_int * 10 - rng.randint(0, 9), 10))
        expected = all(s >= rhs.ceil_int() for s in sums)
        fast = theta_sum_test(ctx, rhs, block=rng.choice([1, 7, 64]))
        ref = theta_sum_test_reference(ctx, rhs)
        assert fast.passed == ref.passed == expected
        assert fast.work == ref.work and fast.witness_y == ref.witness_y
        if not expected:
            assert fast.witness_sum == sums[fast.witness_y - 1]


def test_cosine_defect_examples():
    assert cosine_defect_bound([0], 11).contains(1)
    b = cosine_defect_bound([3], 7)
    assert abs(float(b) - (1 - 72 / 49)) < 1e-15
    assert math.cos(6 * math.pi / 7) <= float(b)
    b = cosine_defect_bound([1], 7, quarter=True)
    assert abs(float(b) - (1 - 16 / 49)) < 1e-15
    assert math.cos(2 * math.pi / 7) <= float(b)
    with pytest.raises(ValueError):
        cosine_defect_bound([2], 7, quarter=True)
    with pytest.raises(ValueError):
        cosine_defect_bound([4], 7)


def test_lemma_bound_dominates_truth():
    """Re sum e(b_j/p) <= the defect bound, for 10^4 random vectors."""
    rng = np.random.default_rng(5)
    primes = [int(p) for p in primes_up_to(5000) if p > 7]
    for i in range(10_000):
        p = int(rng.choice(primes))
        quarter = bool(i % 2)
        half = (p - 1) // (4 if quarter else 2)
        b = rng.integers(-half, half + 1, size=int(rng.integers(1, 30)))
        if quarter:
            b = b[4 * np.abs(b) < p]
            if b.size == 0:
                continue
        re, _ = trig_sum(p, b % p)
        bound = cosine_defect_bound([int(x) for x in b], p, quarter)
        assert re.lower() <= bound.upper()


def test_corollary_gates():
    v = corollary_check("scissors", 2000, 100003)
    assert not v.pruned and not v.applicable
    v = corollary_check("string", 1999, 100003)
    assert not v.applicable
    with pytest.raises(ValueError):
        corollary_check("rope", 2000, 100003)


def test_corollary_products_are_gamma_free():
    for kind, r in (("scissors", 25), ("cord", 9)):
        hd = hermite_data(r)
        theta = corollary_rhs(kind, 1, 2) / (hd.C_lo * cert_root_power(2, 2 * r - 2, r))
        assert (theta * hd.K_lo).contains(CertReal.exact(COROLLARY_THETA_K[kind]))


def test_cord_and_string_verdicts_agree_with_direct():
    pruned = 0
    for kind, lo in (("cord", 8000), ("string", 6500)):
        for p in [int(q) for q in primes_up_to(lo + 3000) if q >= lo]:
            for d in (3, 4, 6, 10, 12):
                if (p - 1) % d:
                    continue
                v = run_corollary(kind, context_for(d, p), 2000)
                if v.pruned:
                    pruned += 1
                    assert direct_check(d, p, 2000).pruned, (kind, d, p)
    assert pruned > 20


def test_string_example_6553():
    v = corollary_check("string", 2000, 6553)
    d = math.gcd(2000, 6552)
    if v.pruned:
        assert direct_check(d, 6553, 2000).pruned
    assert v.criterion == "string"


def test_vase_bound_on_pruned_pairs():
    """G_d(p) <= p - Theta K d^(1-1/r) p^(-2/r) (p-1)^(1/r) whenever string prunes."""
    seen = 0
    for p in [int(q) for q in primes_up_to(12000) if q >= 6500]:
        for d in (2, 3, 4, 6, 8, 12, 24):
            if (p - 1) % d:
                continue
            if not run_corollary("string", context_for(d, p), 2000).pruned:
                continue
            seen += 1
            bound = (CertReal.exact(p) - CertReal.exact(COROLLARY_THETA_K["string"])
                     * cert_root_power(d, 24, 25) * cert_root_power(p, -2, 25)
                     * cert_root_power(p - 1, 1, 25))
            assert certainly_le(g_d_prime(context_for(d, p)).magnitude, bound)
    assert seen > 50


def test_prop1_specializes_to_scissors():
    hd = hermite_data(25)
    theta = CertReal.exact(1) / hd.C_lo
    primes = [int(p) for p in primes_up_to(380000) if p >= 375000][:60]
    compared = 0
    for p in primes:
        a = corollary_check("scissors", 2000, p)
        if not a.applicable:
            continue
        b = prop1_check(2000, p, 25, theta)
        assert a.pruned == b.pruned, p
        compared += 1
        if compared == 20:
            break
    assert compared == 20


def test_prop1_gates():
    # phi(t) < r
    v = prop1_check(2000, 2003, 25, 1)
    assert not v.pruned
    # pbound fails for tiny p even with an easy sum
    v = prop1_check(2000, 1009, 2, 1)
    assert not v.pruned and (v.reason == "pbound fails" or not v.applicable)
    with pytest.raises(ValueError):
        prop1_check(2000, 1009, 2, fmpq(1, 2))


def test_prop2_and_bear():
    assert not prop2_check(2000, 1009, 30).pruned
    p = 8500007
    assert is_prime(p)
    v = bear_check(2000, p)
    assert v.pruned and v.criterion == "bear"
    assert not bear_check(1999, p).applicable
    assert not bear_check(2000, p, t=172).applicable
    with pytest.raises(ValueError):
        bear_check(2000, p, t=174)


def test_gamma_direction_fault_flips_a_verdict():
    """Exchanging the gamma bounds must change a boundary verdict."""
    hd = hermite_data(30)
    p = 1000003
    sound = prop2_check(2000, p, 30, hermite=hd)
    faulty = prop2_check(2000, p, 30, hermite=hd.swapped())
    assert not sound.pruned and faulty.pruned


def test_pbound_holds_is_monotone_in_p():
    assert not pbound_holds(2000, 6000, 25, COROLLARY_THETA_K["string"])
    assert pbound_holds(2000, 6500, 25, COROLLARY_THETA_K["string"])


def test_cp_bound_check():
    assert cp_bound_check(2, 101).pruned
    assert not cp_bound_check(60, 61).pruned


def test_representative_n():
    for d, p in [(4, 101), (6, 7), (10, 6991)]:
        n = representative_n(d, p)
        assert n >= 2000 and math.gcd(n, p - 1) == d


def test_fox_routing():
    rows, unresolved = scan_prime(6491)
    mid = [r for r in rows if r.t <= 636]
    assert mid and all(r.criterion == "direct" for r in mid)
    assert all(r.criterion == "cp-bound" for r in rows if r.t > 636)
    rows, _ = scan_prime(6521)
    assert {r.criterion for r in rows} <= {"string", "cp-bound", "direct"}
    rows, _ = scan_prime(375017)
    assert "string" not in {r.criterion for r in rows}


def test_fox_scan_small_is_clean(tmp_path):
    rep = fox_scan(15000, report_path=tmp_path / "scan.csv")
    assert not rep.failures
    for u in rep.unresolved:
        assert any(r.p == u.p and r.t == u.t and r.verdict == "direct-ok" for r in rep.rows)
    assert read_scan_report(tmp_path / "scan.csv") == rep.rows


def test_fox_scan_resumes_from_checkpoint(tmp_path):
    full = fox_scan(12000)
    report, ck = tmp_path / "r.csv", tmp_path / "ck.json"

    class Stop(Exception):
        pass

    def interrupt(done, total):
        raise Stop

    with pytest.raises(Stop):
        fox_scan(12000, report_path=report, checkpoint_path=ck, checkpoint_every=300,
                 progress=interrupt)
    resumed = fox_scan(12000, report_path=report, checkpoint_path=ck, checkpoint_every=300)
    assert resumed.rows == full.rows
    assert resumed.unresolved == full.unresolved
    assert read_scan_report(report) == full.rows


def test_fox_scan_rejects_bad_arguments():
    with pytest.raises(ValueError):
        fox_scan(9_000_000)
    with pytest.raises(ValueError):
        fox_scan(1000, mode="quick")
