"""Certified computation of Stechkin's constant for Gauss sums.

The constant is A = sup G_n(q) / q^(1-1/n) over n, q >= 2, where G_n(q) is
the largest modulus of a complete sum S_n(a, q) = sum_x e(a x^n / q) with
gcd(a, q) = 1.  Every quantity is carried as a certified enclosure.
"""

from .numeric import CertReal, PrecisionExhausted, Undecided
from .gauss import g_composite, gauss_sum, g_d_prime, g_n_prime
from .pipeline import AnResult, compute_A, compute_A1, compute_A2, global_tail_bound

__all__ = [
    "CertReal", "PrecisionExhausted", "Undecided",
    "gauss_sum", "g_composite", "g_d_prime", "g_n_prime",
    "AnResult", "compute_A", "compute_A1", "compute_A2", "global_tail_bound",
]
