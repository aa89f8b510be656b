"""Why A(n) < 4.7 for all large n.

For n >= 2000 the bound log A(n) <= (3 log n + 172 tau(n) log(172 n + 1)) / n
combined with tau(n) <= 2^(1.54 log n / log log n) is a closed form in n.
It is certified on dyadic blocks up to a point where an analytic argument
takes over.  Below that point the finer divisor-sum bound is screened.
"""

from flint import fmpq

from stechkin.pipeline import coffee_screen, global_tail_bound, upper_bound_A
from stechkin.numeric import CertReal

res = global_tail_bound(fmpq(47, 10), screen=False)
print(f"closed form certifies A(n) < 4.7 for n >= {res.N0}")
print(f"  {res.blocks} dyadic blocks, analytic from n = {res.tail_from}")

for n in (2002, 2003, 27720, 456000):
    print(f"  divisor-sum bound at n = {n}: {upper_bound_A(n).format(8)}")

window = coffee_screen(2000, 3000, CertReal.exact(fmpq(47, 10)).log())
print(f"\nn in [2000, 3000) where the divisor-sum bound is not below 4.7: {len(window)}")
print("  first few:", window[:10])
print("(the full screen over [2000, N0) is `stechkin tail --threshold 4.7`)")
