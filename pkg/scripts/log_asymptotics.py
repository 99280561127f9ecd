"""f_{2n} - log(2n) against log 2 + Euler's constant, for growing n."""

import math

import mpmath

from dcomplex.special import log_even_value

limit = float(mpmath.log(2) + mpmath.euler)
print(f"{'n':>10} {'f_2n - log 2n':>18} {'error':>10}")
for k in range(1, 7):
    n = 10 ** k
    v = log_even_value(n) - math.log(2 * n)
    print(f"{n:>10} {v:>18.12f} {abs(v - limit):>10.2e}")
