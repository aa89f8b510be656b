"""How A(6) comes out of local factors.

A(n) is a product over primes.  For n = 6 the primes 2 and 3 divide n and
contribute prime-power factors; every other prime p enters through
d = gcd(6, p - 1), and only finitely many survive the Cochrane-Pinner test.
Run with ``python demos/01_sixth_power_constant.py``.
"""

from stechkin.gauss import g_composite
from stechkin.pipeline import a1_local_factors, a2_local_factors, compute_A, witness_ratio

n = 6

print(f"Local factors of A({n}) at primes dividing n:")
for f in a1_local_factors(n):
    print(f"  p = {f.p}, best m = {f.m}: ratio {f.ratio.format(15)} ({f.status} 1)")

print("\nPrimes p not dividing n that pass the Cochrane-Pinner test:")
for d, f in a2_local_factors(n):
    mark = "kept" if f.status == "above" else "dropped"
    print(f"  d = {d}, p = {f.p:4d}: G_d(p)/p^(5/6) = {f.ratio.format(12)}  {mark}")

r = compute_A(n)
print(f"\nA({n}) = {r.A.format(20)}  (radius {r.A.rad_float():.1e})")
print(f"extreme modulus q = {r.extreme_modulus}")

# the same number from one sum over Z/qZ, assembled multiplicatively
q = r.extreme_modulus
g = g_composite(n, q)
print(f"maximizing a = {g.argmax_a}; |S_6(a, q)| / q^(5/6) = {witness_ratio(n, q).format(20)}")
