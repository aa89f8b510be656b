"""Pruning pairs (p, t) for large n without evaluating Gauss sums.

For n >= 2000 the pair (p, t = (p-1)/d) is harmless once G_d(p) <= p^(1-1/n).
Large t is settled by the Cochrane-Pinner bound; for 173 <= t <= 636 the
integer test on squared centered residues does the work.  Here a small
window of primes is scanned and one pruned pair is re-checked directly.
"""

from stechkin.bounds import stechkin_threshold
from stechkin.gauss import g_d_prime
from stechkin.prune import context_for, fox_scan, run_corollary

report = fox_scan(20000)
print("verdicts for primes up to 20000:")
for key, count in report.counts().items():
    print(f"  {key:22s} {count}")
print(f"  unresolved by the criteria: {len(report.unresolved)}")

# the first string-pruned row in the report
row = next(r for r in report.rows if r.criterion == "string")
p, t, d = row.p, row.t, row.d
v = run_corollary("string", context_for(d, p), 2000)
print(f"\np = {p}, t = {t}, d = {d}: string test pruned = {v.pruned} after {v.work} terms")
g = g_d_prime(context_for(d, p)).magnitude
print(f"direct check: G_d(p) = {g.format(12)} <= p^(1999/2000) = {stechkin_threshold(p, 2000).format(12)}")
