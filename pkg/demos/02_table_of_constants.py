"""A(n) for 2 <= n <= 40 next to the published eight-digit values.

Also shows the extreme moduli; for several n the modulus listed in the
literature is larger than the one found here and does not attain A(n).
"""

from stechkin.pipeline import compute_A, matches_reported, witness_ratio
from stechkin.reference import REPORTED_A, REPORTED_EXTREME_MODULI
from stechkin.store import GdCache

cache = GdCache()
print(f"{'n':>3} {'A(n)':>14} {'published':>11}  {'our modulus':>18} {'listed modulus':>18}  listed ratio")
for n in range(2, 41):
    r = compute_A(n, cache=cache)
    pub = REPORTED_A.get(n, "")
    ok = "" if n not in REPORTED_A else (" " if matches_reported(r.A, n) else "!")
    listed = REPORTED_EXTREME_MODULI.get(n)
    ratio = f"{float(witness_ratio(n, listed)):.8f}" if listed else ""
    print(f"{n:3d} {r.A.format(10):>14} {pub:>11}{ok} {str(r.extreme_modulus or '-'):>18} "
          f"{str(listed or '-'):>18}  {ratio}")
