"""
How large is the twisted Gauss-sum correlation C(b1, b2, h, u; q)?
==================================================================

C factors over coprime moduli, and the natural bound is
q1^2 q2^(3/2) (h, q2)^(1/2) for the squarefull/squarefree split q = q1 q2.
With implied constant 1 that bound is false already at primes: for q = p
the sum is p times a Kloosterman or Salie sum, which reach 2 sqrt(p).
"""

from __future__ import annotations

import numpy as np

from shiftconv.arith import factor_squarefull_squarefree
from shiftconv.expsums import proposition2_bound, twisted_sum_C, twisted_sum_C_factored

# The smallest counterexample we know of.
b1, b2, h, u, q = 12, 0, 12, 12, 13
C = twisted_sum_C(b1, b2, h, u, q)
print(f"|C({b1},{b2},{h},{u};{q})| = {abs(C):.3f}, bound {proposition2_bound(h, q):.3f}, "
      f"ratio {abs(C) / proposition2_bound(h, q):.3f}")

# Random sample: the factorization is exact; the constant-1 bound fails often,
# the bound with an extra 2^omega(q2) never does.
rng = np.random.default_rng(7)
fails = fails_pp = 0
worst = 0.0
for _ in range(300):
    q = int(rng.integers(2, 1500))
    b1, b2, h, u = (int(v) for v in rng.integers(0, q, size=4))
    s = factor_squarefull_squarefree(q)
    C = twisted_sum_C(b1, b2, h, u, q)
    assert abs(C - twisted_sum_C_factored(b1, b2, h, u, s.q1, s.q2)) <= 1e-8 * max(abs(C), q)
    ratio = abs(C) / proposition2_bound(h, q)
    worst = max(worst, ratio)
    fails += ratio > 1
    fails_pp += abs(C) > proposition2_bound(h, q, per_prime_constant=True)
print(f"constant 1: {fails}/300 exceed (worst ratio {worst:.2f}); with 2^omega(q2): {fails_pp}/300")
