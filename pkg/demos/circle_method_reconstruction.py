"""
Rebuilding a shifted convolution sum from the Farey arcs
========================================================

S*_h(X) = sum r_2(n) lambda(n+h) phi(n/X) is the zeroth Fourier coefficient
of F(alpha)^2 G(alpha), where F is the theta sum over |m| <= sqrt(X) and
G carries the tau coefficients.  Integrating F^2 G over every arc of the
Farey dissection of order Q = [5 sqrt X] must give S* back, and on each arc
F is close to 2 G(a,0;q) Phi_0(beta) / q.
"""

from __future__ import annotations

import math

from shiftconv.circle import farey_dissect
from shiftconv.coeffs import ramanujan_tau
from shiftconv.shifted import circle_reconstruction
from shiftconv.special import theta_major_arc

table = ramanujan_tau(2000)
for X in (100.0, 400.0, 1600.0):
    for h in (1, 7):
        r = circle_reconstruction(h, X, table)
        print(f"X={X:6g} h={h}: direct {r.direct: .6e}  arcs {r.reconstructed.real: .6e}  "
              f"relerr {r.relerr:.1e}  ({r.n_arcs} arcs, Q={r.Q})")

# The major-arc approximation of F at the centre and ends of a few arcs.
X = 1e4
arcs = [a for a in farey_dissect(int(5 * math.sqrt(X))) if a.q in (1, 7, 31)][:6]
print("\n a/q      beta          |F - approx|")
for arc in arcs:
    for beta in (float(arc.left), 0.0, float(arc.right)):
        res = theta_major_arc(arc.a % arc.q or 1, arc.q, beta, X)
        print(f"{arc.a:2d}/{arc.q:<3d} {beta: .3e}   {res.residual:.3f}")
