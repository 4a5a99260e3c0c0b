"""Two circle-method engines.

Jutila's variant replaces the indicator of [0, 1] by an average of short
intervals [a/q - delta, a/q + delta] over reduced fractions whose
denominators come from a flexible set of moduli q = 4 D p.  The classical
variant dissects the unit interval into Farey arcs of order Q.

Interval arithmetic is exact wherever it decides a structural property:
Farey endpoints are Fractions, and the L^2 discrepancy of Jutila's
approximation is integrated piece by piece between sorted breakpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arith import is_prime, primes_upto, totient
from .special import QuadratureError, integrate, oscillation_panels

# L >= MODULI_DENSITY_C * Q^2 / log Q for Q >= 1000; the observed minimum over
# D = 1..4, h <= 1000, Q in [10^3, 2*10^4] is 0.014
MODULI_DENSITY_C = 0.01
BREAKPOINT_CAP = 10**8


class EmptyModuliSetError(ValueError):
    """No prime in [Q/(8D), Q/(4D)] is coprime to 2Dh."""


@dataclass(frozen=True)
class ModuliSet:
    D: int
    Q: float
    moduli: tuple[int, ...]
    h: int
    L: int  # sum of phi(q) over the set

    def __post_init__(self):
        lo, hi = self.Q / (8 * self.D), self.Q / (4 * self.D)
        for q in self.moduli:
            p, r = divmod(q, 4 * self.D)
            if r or not is_prime(p) or not lo <= p <= hi or math.gcd(p, 2 * self.D * self.h) != 1:
                raise ValueError(f"modulus {q} is not 4*{self.D}*p with p admissible")
        if list(self.moduli) != sorted(set(self.moduli)):
            raise ValueError("moduli must be sorted and distinct")
        if self.L != sum(totient(q) for q in self.moduli):
            raise ValueError("L does not match the sum of totients")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(q // (4 * self.D) for q in self.moduli)

    def density_ok(self, c: float = MODULI_DENSITY_C) -> bool:
        """L >= c Q^2 / log Q (asserted only for Q >= 1000)."""
        return self.Q < 1000 or self.L >= c * self.Q**2 / math.log(self.Q)


def build_moduli_set(D: int, Q: float, h: int) -> ModuliSet:
    """{4 D p : p prime in [Q/(8D), Q/(4D)], (p, 2Dh) = 1}."""
    if D < 1:
        raise ValueError(f"level D must be >= 1, got {D}")
    if Q < 16 * D:
        raise ValueError(f"need Q >= 16 D = {16 * D}, got Q = {Q}")
    lo, hi = Q / (8 * D), Q / (4 * D)
    ps = [int(p) for p in primes_upto(int(math.floor(hi))) if p >= lo and math.gcd(int(p), 2 * D * h) == 1]
    if not ps:
        raise EmptyModuliSetError(f"no admissible prime in [{lo:g}, {hi:g}] for D={D}, h={h}")
    moduli = tuple(4 * D * p for p in ps)
    return ModuliSet(D, float(Q), moduli, h, sum(totient(q) for q in moduli))


def _check_delta(ms: ModuliSet, delta: float):
    Q = ms.Q
    if not Q**-2 * (1 - 1e-12) <= delta <= Q**-1 * (1 + 1e-12):
        raise ValueError(f"delta must lie in [Q^-2, Q^-1] = [{Q**-2:g}, {1 / Q:g}], got {delta}")


def jutila_indicator(ms: ModuliSet, delta: float, x) -> np.ndarray | float:
    """I~(x) = #{a/q : q in set, (a, q) = 1, ||x - a/q|| <= delta} / (2 delta L).

    Distances are taken modulo 1, so intervals near 0 and 1 wrap around.
    """
    _check_delta(ms, delta)
    x = np.asarray(x, dtype=float)
    flat = np.mod(x.reshape(-1), 1.0)
    count = np.zeros(flat.shape, dtype=np.int64)
    for q in ms.moduli:
        first = np.ceil(q * (flat - delta)).astype(np.int64)
        last = np.floor(q * (flat + delta)).astype(np.int64)
        # q delta <= 1, so at most three candidate numerators per point
        for k in range(3):
            a = first + k
            inside = a <= last
            count += inside & (np.gcd(np.mod(a, q), q) == 1)
    out = (count / (2 * delta * ms.L)).reshape(x.shape)
    return out if out.ndim else float(out)


def _jutila_pieces(ms: ModuliSet, delta: float):
    """Breakpoints and the constant value of I~ on each piece of [0, 1)."""
    n_fractions = ms.L
    if 2 * n_fractions + 2 > BREAKPOINT_CAP:
        raise ValueError(f"{2 * n_fractions} breakpoints exceed the cap {BREAKPOINT_CAP}")
    starts, ends = [], []
    for q in ms.moduli:
        a = np.arange(1, q + 1, dtype=np.int64)
        a = a[np.gcd(a, q) == 1]
        starts.append(a / q - delta)
        ends.append(a / q + delta)
    starts, ends = np.concatenate(starts), np.concatenate(ends)
    events = np.concatenate([np.mod(starts, 1.0), np.mod(ends, 1.0)])
    weights = np.concatenate([np.ones(len(starts)), -np.ones(len(ends))])
    # an interval containing 0 (mod 1) is already open at x = 0
    initial = int(np.sum(starts < 0) + np.sum(ends > 1))
    order = np.argsort(events, kind="stable")
    pts = np.concatenate([[0.0], events[order], [1.0]])
    counts = initial + np.concatenate([[0], np.cumsum(weights[order])])
    return pts, counts / (2 * delta * ms.L)


def jutila_mass(ms: ModuliSet, delta: float) -> float:
    """int_0^1 I~(x) dx, integrated exactly between breakpoints (should be 1)."""
    _check_delta(ms, delta)
    pts, vals = _jutila_pieces(ms, delta)
    return float(np.sum(np.diff(pts) * vals))


def jutila_l2_error(ms: ModuliSet, delta: float) -> float:
    """int_0^1 |1 - I~(x)|^2 dx, exactly (I~ is piecewise constant)."""
    _check_delta(ms, delta)
    pts, vals = _jutila_pieces(ms, delta)
    return float(np.sum(np.diff(pts) * (1 - vals) ** 2))


def jutila_constant(ms: ModuliSet, delta: float) -> float:
    """The L^2 error normalized by Q^2 / (delta L^2)."""
    return jutila_l2_error(ms, delta) * delta * ms.L**2 / ms.Q**2


# --------------------------------------------------------------------------
# Farey dissection

@dataclass(frozen=True)
class FareyArc:
    """M(a, q) = a/q + [left, right] with left = -1/(q(q+q')), right = 1/(q(q+q'')).

    q' and q'' are the denominators of the Farey neighbours; endpoints are
    exact Fractions built on demand.
    """

    a: int
    q: int
    q_left: int
    q_right: int

    @property
    def left(self) -> Fraction:
        return Fraction(-1, self.q * (self.q + self.q_left))

    @property
    def right(self) -> Fraction:
        return Fraction(1, self.q * (self.q + self.q_right))

    @property
    def center(self) -> Fraction:
        """a/q reduced into [0, 1): the arc around 1/1 sits at 0."""
        return Fraction(self.a % self.q, self.q)

    @property
    def interval(self) -> tuple[Fraction, Fraction]:
        c = self.center
        return c + self.left, c + self.right

    @property
    def length(self) -> Fraction:
        return self.right - self.left

    def _ends(self) -> tuple[int, int, int, int]:
        """Unreduced (num, den) of both endpoints, for exact integer comparison."""
        a, q = self.a % self.q, self.q
        dl, dr = q * (q + self.q_left), q * (q + self.q_right)
        return a * (q + self.q_left) - 1, dl, a * (q + self.q_right) + 1, dr


def farey_sequence(Q: int) -> list[tuple[int, int]]:
    """Reduced fractions 0/1 < ... < 1/1 with denominator <= Q (next-term recurrence)."""
    if Q < 1:
        raise ValueError(f"Q must be >= 1, got {Q}")
    a, b, c, d = 0, 1, 1, Q
    out = [(0, 1)]
    while c <= d:
        out.append((c, d))
        k = (Q + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return out


def farey_dissect(Q: int) -> list[FareyArc]:
    """The arcs M(a, q), 1 <= a <= q <= Q, (a, q) = 1, in increasing order of a/q.

    q' and q'' are the denominators of the Farey neighbours of a/q, so
    a q' = 1 and a q'' = -1 (mod q); the neighbour to the right of 1/1 is
    1/Q + 1 by periodicity.
    """
    seq = farey_sequence(Q)
    arcs = []
    for i in range(1, len(seq)):
        a, q = seq[i]
        q_right = seq[i + 1][1] if i + 1 < len(seq) else Q
        arcs.append(FareyArc(a, q, seq[i - 1][1], q_right))
    return arcs


def check_partition(arcs: list[FareyArc], Q: int) -> Fraction:
    """Total gap plus overlap when the arcs are laid out over [-1/(Q+1), 1 - 1/(Q+1)].

    Zero means an exact partition.  Adjacent endpoints are compared by
    integer cross-multiplication; Fractions are formed only for a defect.
    """
    ends = sorted((arc._ends() for arc in arcs), key=lambda e: e[0] / e[1])
    first, last = ends[0], ends[-1]
    defect = abs(Fraction(first[0], first[1]) + Fraction(1, Q + 1)) + abs(Fraction(last[2], last[3]) - Fraction(Q, Q + 1))
    for (_, _, rn, rd), (ln, ld, _, _) in zip(ends, ends[1:]):
        if rn * ld != ln * rd:
            defect += abs(Fraction(ln, ld) - Fraction(rn, rd))
    return defect


@dataclass(frozen=True)
class ArcQuadrature:
    value: complex
    per_arc: np.ndarray
    errors: np.ndarray


class ArcQuadratureError(QuadratureError):
    def __init__(self, arc: FareyArc, cause: Exception):
        self.arc = arc
        super().__init__(f"quadrature failed on M({arc.a}, {arc.q}): {cause}")


def major_arc_quadrature(
    arcs: list[FareyArc],
    integrand,
    *,
    frequency: float = 0.0,
    rtol: float = 1e-10,
    atol: float = 0.0,
) -> ArcQuadrature:
    """Sum over arcs of int_{M(a,q)} integrand(a, q, beta) d beta.

    ``integrand(a, q, beta)`` receives a 1-d array of beta and returns an
    array of the same length.  ``frequency`` bounds |d phase / d beta| / 2 pi
    (for a trigonometric polynomial: its largest frequency) and sets the
    initial panels.  ``atol`` is an absolute tolerance per unit length of
    beta, so the tolerances of all arcs add up to at most ``atol``.
    """
    per_arc = np.empty(len(arcs), dtype=complex)
    errors = np.empty(len(arcs))
    for i, arc in enumerate(arcs):
        lo, hi = float(arc.left), float(arc.right)
        edges = oscillation_panels(lo, hi, 2 * math.pi * frequency * (hi - lo), 1)
        try:
            res = integrate(
                lambda b, arc=arc: integrand(arc.a, arc.q, b),
                lo,
                hi,
                rtol=rtol,
                atol=atol * (hi - lo),
                breakpoints=edges,
            )
        except QuadratureError as exc:
            raise ArcQuadratureError(arc, exc) from exc
        per_arc[i] = res.value
        errors[i] = res.error
    return ArcQuadrature(complex(per_arc.sum()), per_arc, errors)
