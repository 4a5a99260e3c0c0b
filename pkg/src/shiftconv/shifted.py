"""Shifted convolution sums S_h(X) = sum_{n <= X} lambda_f(n + h) r_l(n).

Direct and smoothed evaluation, the Farey-arc reconstruction of the
smoothed sum from F(alpha)^2 G(alpha), and least-squares growth exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import repr_count
from .circle import farey_dissect, major_arc_quadrature
from .coeffs import CoefficientTable
from .special import theta_sum_F
from .voronoi import make_window


class TableTooShortError(ValueError):
    pass


def _need(table: CoefficientTable, n_max: int):
    if n_max > table.n_max:
        raise TableTooShortError(f"need lambda(n) up to n = {n_max}, table stops at {table.n_max}")


def _products(ell: int, h: int, n_max: int, table: CoefficientTable) -> np.ndarray:
    """lambda(n + h) r_l(n) for n = 0..n_max (entry 0 is dropped by callers)."""
    _need(table, n_max + h)
    r = repr_count(ell, n_max).values.astype(float)
    return np.asarray(table.lam[h : n_max + h + 1]) * r


def shifted_sum_direct(ell: int, h: int, X: float, table: CoefficientTable) -> float:
    """sum_{1 <= n <= X} lambda(n + h) r_l(n)."""
    if h < 0:
        raise ValueError("h must be >= 0")
    N = int(math.floor(X))
    if N < 1:
        return 0.0
    return float(_products(ell, h, N, table)[1:].sum())


def trivial_bound(ell: int, h: int, X: float, table: CoefficientTable) -> float:
    """sum_{1 <= n <= X} |lambda(n + h)| r_l(n), a ceiling for |S_h(X)|."""
    N = int(math.floor(X))
    if N < 1:
        return 0.0
    return float(np.abs(_products(ell, h, N, table)[1:]).sum())


@dataclass(frozen=True)
class SmoothedSum:
    smoothed: float  # sum lambda(n+h) r(n) phi(n/X)
    dyadic: float  # sum over X/2 < n <= X
    gap: float  # dyadic - smoothed
    gap_bound: float  # edge-band count times the band maximum of |lambda r|
    edge_count: int


def shifted_sum_smoothed(ell: int, h: int, X: float, Delta: float, table: CoefficientTable) -> SmoothedSum:
    """The phi(n/X)-weighted sum, with its gap to the sharp dyadic sum."""
    if h < 0:
        raise ValueError("h must be >= 0")
    w = make_window("theta", X, Delta)
    N = int(math.floor(X))
    prod = _products(ell, h, N, table)
    n = np.arange(int(math.floor(X / 2)) + 1, N + 1)
    weights = w(n)
    terms = prod[n]
    smoothed = float((terms * weights).sum())
    dyadic = float(terms.sum())
    band = weights < 1.0
    edge = np.abs(terms[band])
    bound = float(band.sum() * edge.max()) if band.any() else 0.0
    return SmoothedSum(smoothed, dyadic, dyadic - smoothed, bound, int(band.sum()))


# --------------------------------------------------------------------------
# reconstruction through the Farey dissection (l = 2)

def _G_factory(h: int, X: float, Delta: float, table: CoefficientTable):
    w = make_window("theta", X, Delta)
    n = np.arange(int(math.floor(X / 2)) + 1, int(math.floor(X)) + 1, dtype=np.int64)
    _need(table, int(n[-1]) + h)
    c = np.asarray(table.lam[n + h]) * w(n)

    def G(a: int, q: int, beta) -> np.ndarray:
        """G(a/q + beta) = sum lambda(n+h) phi(n/X) e(-(a/q + beta) n)."""
        beta = np.asarray(beta, dtype=float)
        exact = np.exp(-2j * math.pi * ((a * n) % q) / q) * c
        return np.exp(-2j * math.pi * np.outer(beta, n)) @ exact

    return G, c


@dataclass(frozen=True)
class Reconstruction:
    direct: float
    reconstructed: complex
    relerr: float
    Q: int
    n_arcs: int


def circle_reconstruction(
    h: int, X: float, table: CoefficientTable, Delta: float = 8.0, rtol: float = 1e-10
) -> Reconstruction:
    """S*_h(X) = sum r_2(n) lambda(n+h) phi(n/X), directly and as sum_arcs int F^2 G.

    Q = floor(5 sqrt X).  The direct side uses the r_2 table; the arc side
    only ever sees F (a sum over lattice points m) and G.
    """
    if X > 1e4:
        raise ValueError("reconstruction is limited to X <= 10^4")
    direct = shifted_sum_smoothed(2, h, X, Delta, table).smoothed
    G, c = _G_factory(h, X, Delta, table)
    Q = int(5 * math.sqrt(X))
    arcs = farey_dissect(Q)

    def integrand(a, q, beta):
        F = theta_sum_F(beta, X, a=a, q=q)
        return F * F * G(a, q, beta)

    trivial = (2 * math.isqrt(int(X)) + 1) ** 2 * np.abs(c).sum()
    res = major_arc_quadrature(arcs, integrand, frequency=2 * X, rtol=rtol, atol=1e-13 * trivial)
    return Reconstruction(direct, res.value, abs(res.value - direct) / abs(direct), Q, len(arcs))


# --------------------------------------------------------------------------
# growth exponents

def theorem_exponent(ell: int, theta: float) -> float:
    """l/2 - (l - 1 - 2 theta)/12."""
    return ell / 2 - (ell - 1 - 2 * theta) / 12


def corollary_exponent(theta: float) -> float:
    """1 - (1 - 4 theta)/8."""
    return 1 - (1 - 4 * theta) / 8


@dataclass(frozen=True)
class ExperimentGrid:
    ell: int
    X_values: tuple[float, ...]
    h_values: tuple[int, ...]
    Delta: float
    table: CoefficientTable

    def __post_init__(self):
        xs = tuple(float(x) for x in self.X_values)
        object.__setattr__(self, "X_values", xs)
        object.__setattr__(self, "h_values", tuple(int(h) for h in self.h_values))
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("X_values must be increasing")
        if any(h < 1 or h > xs[-1] for h in self.h_values):
            raise ValueError("every h must satisfy 1 <= h <= max X")
        _need(self.table, int(xs[-1]) + max(self.h_values))


@dataclass(frozen=True)
class ExponentFit:
    h: int
    slope: float
    intercept: float
    residual: float
    theorem_exponent: float
    corollary_exponent: float | None
    amplitude: float  # sup_X |S_h(X)| / X^slope
    rms: tuple[float, ...]  # dyadic RMS of S_h at each grid point


def dyadic_rms(ell: int, h: int, X_values, table: CoefficientTable) -> np.ndarray:
    """sqrt(mean_{X/2 < x <= X} S_h(x)^2) for each X, from one cumulative sum."""
    N = int(max(X_values))
    S = np.cumsum(_products(ell, h, N, table)[1:])  # S[x-1] = S_h(x)
    out = []
    for X in X_values:
        lo, hi = int(math.floor(X / 2)), int(math.floor(X))
        seg = S[lo:hi]
        out.append(math.sqrt(float(np.mean(seg**2))))
    return np.array(out)


def exponent_fit(grid: ExperimentGrid) -> list[ExponentFit]:
    """Least-squares slope of log(dyadic RMS of S_h) against log X, per h."""
    xs = np.array(grid.X_values)
    if len(xs) < 4 or math.log10(xs[-1] / xs[0]) < 1.5 - 1e-9:
        raise ValueError("need >= 4 X values spanning >= 1.5 decades")
    theta = grid.table.spec.theta
    fits = []
    for h in grid.h_values:
        rms = dyadic_rms(grid.ell, h, xs, grid.table)
        if np.any(rms == 0):
            raise ValueError(f"S_h(X) vanishes identically on a window (h = {h})")
        A = np.vstack([np.log(xs), np.ones_like(xs)]).T
        coef, *_ = np.linalg.lstsq(A, np.log(rms), rcond=None)
        resid = float(np.sqrt(np.mean((A @ coef - np.log(rms)) ** 2)))
        fits.append(
            ExponentFit(
                h=h,
                slope=float(coef[0]),
                intercept=float(coef[1]),
                residual=resid,
                theorem_exponent=theorem_exponent(grid.ell, theta),
                corollary_exponent=corollary_exponent(theta) if grid.ell == 2 else None,
                amplitude=float(np.max(rms / xs ** coef[0])),
                rms=tuple(float(v) for v in rms),
            )
        )
    return fits
