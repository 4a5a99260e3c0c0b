"""
How fast do the shifted sums grow?
==================================

We fit the slope of log(dyadic RMS of S_h(X)) against log X for the Delta
form and compare it with the exponents the theorems allow.  The theorems
are upper bounds with an epsilon, so the fitted slopes are expected to sit
well below them; square-root cancellation would give about l/2 - 1/2.

Pass a larger limit (e.g. 1e6) on the command line for a longer run.
"""

from __future__ import annotations

import sys

import numpy as np

from shiftconv.coeffs import ramanujan_tau
from shiftconv.shifted import ExperimentGrid, corollary_exponent, exponent_fit, theorem_exponent

limit = float(sys.argv[1]) if len(sys.argv) > 1 else 2e5
X = tuple(np.geomspace(limit / 100, limit, 5))
h_values = (1, 5, 101)
table = ramanujan_tau(int(limit) + max(h_values))

for ell in (2, 3):
    print(f"l = {ell}: theorem exponent {theorem_exponent(ell, 0.0):.4f} (theta = 0), "
          f"{theorem_exponent(ell, 7 / 64):.4f} (theta = 7/64)")
    for fit in exponent_fit(ExperimentGrid(ell, X, h_values, 16.0, table)):
        print(f"   h={fit.h:3d} slope {fit.slope:.3f}  fit residual {fit.residual:.3f}  "
              f"amplitude {fit.amplitude:.3g}")
print(f"corollary exponent (theta = 7/64): {corollary_exponent(7 / 64):.6f}")
