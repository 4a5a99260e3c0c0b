"""
Two ways to cut up the unit interval
====================================

Jutila's approximation averages short intervals around a/q over a flexible
set of moduli 4Dp; its L^2 distance from 1 is bounded by Q^2/(delta L^2).
The Farey dissection instead partitions [-1/(Q+1), 1 - 1/(Q+1)] exactly.
"""

from __future__ import annotations

from shiftconv.circle import build_moduli_set, check_partition, farey_dissect, jutila_constant, jutila_mass

print("  Q    L      delta     mass            L2 constant")
for Q in (40, 80, 160, 320, 640):
    ms = build_moduli_set(1, float(Q), 1)
    for delta in (1 / Q, Q**-1.5, Q**-2.0):
        print(f"{Q:4d} {ms.L:6d}  {delta:.2e}  {jutila_mass(ms, delta):.12f}  {jutila_constant(ms, delta):.4f}")

# Exact rational bookkeeping: no gap and no overlap for any order.
defects = [check_partition(farey_dissect(Q), Q) for Q in range(1, 201)]
print("\nFarey orders 1..200 with a nonzero defect:", sum(d != 0 for d in defects))
print("arcs of order 5:", [(a.a, a.q, str(a.left), str(a.right)) for a in farey_dissect(5)])
