import math

import mpmath
import pytest
import sympy
from flint import fmpq

from stechkin.numeric import CertReal, Order, cert_compare, cert_root_power, certainly_le
from stechkin.pipeline import (a2_pairs, analytic_tail_holds, closed_form_holds, coffee_screen,
                               compute_A, compute_A1, compute_A2, e2_series, e_lower_witness,
                               global_tail_bound, matches_reported, minimal_closed_form_start,
                               retained_modulus, upper_bound_A, witness_ratio)
from stechkin.reference import REPORTED_A, REPORTED_EXTREME_MODULI
from stechkin.store import GdCache

from test_numeric import encloses


def test_a1_for_two_is_sqrt_two():
    a1, witnesses = compute_A1(2)
    assert encloses(a1, mpmath.sqrt(2))
    assert [(p, m) for p, m, _ in witnesses] == [(2, 2)]


def test_a2_trivial_cases():
    a2, surv = compute_A2(2)
    assert a2.contains(1) and a2.is_exact() and not surv
    a2, surv = compute_A2(31)
    assert a2.contains(1) and not surv


def test_a_of_five():
    r = compute_A(5)
    assert abs(float(r.A) - 2.59880326) < 2e-8
    assert {p for _, p, _ in r.surviving_pairs} <= {11, 31, 41, 61, 71, 101}
    assert r.A.overlaps(r.A1 * r.A2)


def test_a_of_four_and_six():
    r = compute_A(4)
    assert abs(float(r.A) - 4.26259099) < 2e-8 and r.extreme_modulus == 724880
    r = compute_A(6)
    assert abs(float(r.A) - 4.70923685314526794358) < 1e-12
    assert r.extreme_modulus == 4606056
    assert {(p, m) for p, m, _ in r.witnesses} == {(2, 3), (3, 2)}
    assert r.extreme_modulus % (8 * 9) == 0


def test_nineteen_has_no_witness():
    r = compute_A(19)
    assert r.A.is_exact() and r.A.contains(1)
    assert r.extreme_modulus is None and not r.witnesses and not r.surviving_pairs


def test_range_is_enforced():
    with pytest.raises(ValueError):
        compute_A(1)
    with pytest.raises(ValueError):
        compute_A(2001)
    assert compute_A(41, n_max=50).n == 41


@pytest.mark.parametrize("n", range(2, 41))
def test_structural_properties(n):
    r = compute_A(n)
    assert r.A.upper() >= 1
    assert not r.ties
    # A(n) <= n^(3/n) A2(n)
    assert certainly_le(r.A, cert_root_power(n, 3, n) * r.A2) or r.A.overlaps(
        cert_root_power(n, 3, n) * r.A2)
    if r.extreme_modulus is not None:
        ratio = witness_ratio(n, r.extreme_modulus)
        assert ratio.overlaps(r.A)
        assert abs(float(ratio) - float(r.A)) < 1e-8


def test_matches_reported_tolerance():
    r = compute_A(7)
    assert matches_reported(r.A, 7)
    shifted = r.A + CertReal.exact(fmpq(3, 10 ** 8))
    assert not matches_reported(shifted, 7)


def test_cold_and_warm_cache_agree(tmp_path):
    path = tmp_path / "gd.csv"
    cold = GdCache(path)
    results_cold = [compute_A2(n, cache=cold) for n in (12, 24, 30)]
    assert cold.misses > 0
    cold.flush()
    warm = GdCache(path)
    results_warm = [compute_A2(n, cache=warm) for n in (12, 24, 30)]
    assert warm.misses == 0 and warm.hits > 0
    for (a, sa), (b, sb) in zip(results_cold, results_warm):
        assert a.mid_rad_hex() == b.mid_rad_hex()
        assert [(d, p, g.mid_rad_hex()) for d, p, g in sa] == [(d, p, g.mid_rad_hex()) for d, p, g in sb]
    fresh = [compute_A2(n) for n in (12, 24, 30)]
    for (a, _), (b, _) in zip(results_cold, fresh):
        assert a.mid_rad_hex() == b.mid_rad_hex()


def test_parallel_prefill_matches_serial():
    serial = compute_A(24)
    parallel = compute_A(24, jobs=2)
    assert serial.A.mid_rad_hex() == parallel.A.mid_rad_hex()


def test_a2_pairs_sorted_and_unique():
    pairs = a2_pairs(36)
    assert pairs == sorted(set(pairs), key=pairs.index)
    assert all(36 % d == 0 and d >= 3 and math.gcd(36, p - 1) == d for d, p in pairs)


def test_structural_rule_reproduces_listed_moduli():
    for n, q in REPORTED_EXTREME_MODULI.items():
        assert retained_modulus(n) == q, n


def test_coffee_bounds():
    assert upper_bound_A(2003).upper() < 1.2
    assert encloses(upper_bound_A(2003), mpmath.power(2003, mpmath.mpf(3) / 2003)
                    * mpmath.exp(sum(mpmath.log(2003 * t + 1) for t in range(1, 173)
                                     if sympy.isprime(2003 * t + 1)) / 2003))
    for n in range(2000, 100000, 1999):
        assert certainly_le(upper_bound_A(n, "coffee"), upper_bound_A(n, "coffee2"))
    assert upper_bound_A(456000, "coffee2").upper() < 4.7
    with pytest.raises(ValueError):
        upper_bound_A(1999)


def test_closed_form_blocks():
    lt = CertReal.exact(fmpq(47, 10)).log()
    assert closed_form_holds(455121, 455121, lt)
    assert not closed_form_holds(455120, 455120, lt)
    assert analytic_tail_holds(2 ** 19, lt)
    with pytest.raises(ValueError):
        closed_form_holds(10, 20, lt)


def test_tail_without_screening():
    res = global_tail_bound(fmpq(47, 10), screen=False)
    assert res.N0 <= 456000 and res.N0 == 455121
    assert res.verified_from == res.N0
    n0, blocks, tail = minimal_closed_form_start(CertReal.exact(fmpq(47, 10)).log(), 2000)
    assert (n0, blocks, tail) == (res.N0, res.blocks, res.tail_from)


def test_tail_with_huge_threshold():
    res = global_tail_bound(10 ** 6)
    assert res.exceptions == []
    assert res.verified_from == 2000
    assert res.N0 >= 2000


def test_screen_matches_certified_bound_on_a_window():
    lt = CertReal.exact(fmpq(47, 10)).log()
    flagged = coffee_screen(2000, 2600, lt)
    assert {2002, 2004, 2010} <= set(flagged)
    for n in range(2000, 2600):
        below = cert_compare(upper_bound_A(n), CertReal.exact(fmpq(47, 10))) is Order.LESS
        assert below == (n not in flagged), n


@pytest.mark.parametrize("p", [5, 7, 11, 13, 101, 499])
def test_e_lower_witness(p):
    assert e_lower_witness(p)


def test_e_lower_witness_equality_cases():
    from stechkin.gauss import g_n_prime
    for p, n in [(5, 2), (11, 5), (7, 3)]:
        g = g_n_prime(n, p).magnitude
        assert encloses(g, 1 + (p - 1) * mpmath.cos(2 * mpmath.pi / p))
    with pytest.raises(ValueError):
        e_lower_witness(9)


def test_e2_series_properties():
    rows = e2_series(40, ["1.74"])
    assert rows[0].N == 2 and rows[0].E2.contains(0)
    for a, b in zip(rows, rows[1:]):
        assert b.E2.upper() >= a.E2.lower()
    assert rows[-1].E2.upper() >= 0
    e40 = sum(float(REPORTED_A[n]) - 1 for n in range(3, 41)) + (math.sqrt(2) - 1)
    assert float(rows[-1].E2) <= e40
    scaled = rows[-1].scaled["1.74"]
    assert encloses(scaled, mpmath.mpf(float(rows[-1].E2.mid)) / mpmath.log(40) ** mpmath.mpf("1.74")) or \
        abs(float(scaled) - float(rows[-1].E2) / math.log(40) ** 1.74) < 1e-12
