"""Smooth windows, Bessel transforms and two-sided Voronoi checks.

Windows are products of two smooth steps built from exp(-1/t), so every
derivative is available in closed form; derivatives up to order 4 are
computed by truncated Taylor (jet) arithmetic.

The Voronoi verifiers evaluate both sides of each identity independently:
the left side as a finite sum over the window's support, the right side as
main term plus a dual sum whose terms are Bessel transforms computed by the
shared quadrature engine.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special as sp

from .arith import epsilon_unit, jacobi_symbol, mod_inverse, repr_count
from .coeffs import CoefficientTable, FormKind
from .special import (
    Branch,
    KernelSpec,
    integrate,
    kernel_interpolant,
    kernel_H,
    oscillation_panels,
)

MAX_ORDER = 4


# --------------------------------------------------------------------------
# windows

def _psi_polys(order: int) -> list[Polynomial]:
    # d^k/dt^k exp(-1/t) = p_k(1/t) exp(-1/t), p_{k+1}(u) = u^2 (p_k(u) - p_k'(u))
    polys = [Polynomial([1.0])]
    u2 = Polynomial([0.0, 0.0, 1.0])
    for _ in range(order):
        p = polys[-1]
        polys.append(u2 * (p - p.deriv()))
    return polys


_PSI = _psi_polys(MAX_ORDER)
_FACT = np.array([math.factorial(k) for k in range(MAX_ORDER + 1)], dtype=float)


def _psi_jet(t: np.ndarray, order: int) -> np.ndarray:
    """Taylor coefficients psi^(k)(t)/k!, k = 0..order, of psi(t) = exp(-1/t) [t > 0]."""
    out = np.zeros((order + 1,) + t.shape)
    pos = t > 1e-3  # exp(-1000) underflows anyway
    u = 1.0 / t[pos]
    e = np.exp(-u)
    for k in range(order + 1):
        out[k, pos] = _PSI[k](u) * e / _FACT[k]
    return out


def _jet_mul(a, b):
    n = len(a)
    return np.array([sum(a[j] * b[k - j] for j in range(k + 1)) for k in range(n)])


def _jet_div(a, b):
    n = len(a)
    c = [a[0] / b[0]]
    for k in range(1, n):
        c.append((a[k] - sum(b[j] * c[k - j] for j in range(1, k + 1))) / b[0])
    return np.array(c)


def _step_jet(t: np.ndarray, order: int) -> np.ndarray:
    """Jet of the smooth step rho(t) = psi(t) / (psi(t) + psi(1 - t))."""
    a = _psi_jet(t, order)
    b = _psi_jet(1.0 - t, order) * ((-1.0) ** np.arange(order + 1))[:, None]
    return _jet_div(a, a + b)


def _scale_jet(jet: np.ndarray, s: float) -> np.ndarray:
    return jet * (s ** np.arange(len(jet)))[:, None]


class WindowKind(enum.Enum):
    THETA = "theta"  # phi(x/X), support [X/2, X]
    PLATEAU = "plateau"  # phi((x - h)/X), support [h + X/2, h + X]


@dataclass(frozen=True)
class SmoothWindow:
    kind: WindowKind
    X: float
    Delta: float
    h: int = 0

    @property
    def shift(self) -> float:
        return float(self.h) if self.kind is WindowKind.PLATEAU else 0.0

    @property
    def support(self) -> tuple[float, float]:
        return self.shift + self.X / 2, self.shift + self.X

    @property
    def plateau(self) -> tuple[float, float]:
        return (
            self.shift + self.X * (0.5 + 1 / self.Delta),
            self.shift + self.X * (1 - 1 / self.Delta),
        )

    def profile(self, u, deriv: int = 0) -> np.ndarray:
        """phi^(deriv)(u) for the unit bump on [1/2, 1]."""
        if not 0 <= deriv <= MAX_ORDER:
            raise ValueError(f"derivatives are available up to order {MAX_ORDER}")
        u = np.asarray(u, dtype=float)
        flat = u.reshape(-1)
        d = self.Delta
        left = _scale_jet(_step_jet(d * (flat - 0.5), deriv), d)
        right = _scale_jet(_step_jet(d * (1.0 - flat), deriv), -d)
        val = _jet_mul(left, right)[deriv] * _FACT[deriv]
        return val.reshape(u.shape)

    def __call__(self, x, deriv: int = 0) -> np.ndarray:
        """d^deriv/dx^deriv of the window at x (in the original variable)."""
        x = np.asarray(x, dtype=float)
        return self.profile((x - self.shift) / self.X, deriv) / self.X**deriv

    def edge_band(self) -> list[tuple[float, float]]:
        lo, hi = self.support
        p_lo, p_hi = self.plateau
        return [(lo, p_lo), (p_hi, hi)]

    def breakpoints(self) -> np.ndarray:
        lo, hi = self.support
        p_lo, p_hi = self.plateau
        return np.array([lo, p_lo, p_hi, hi])


def make_window(kind, X: float, Delta: float, h: int = 0) -> SmoothWindow:
    """The bump of sharpness Delta on [X/2, X] (shifted by h for PLATEAU)."""
    kind = WindowKind(kind) if not isinstance(kind, WindowKind) else kind
    if not Delta > 4:
        raise ValueError(f"Delta must exceed 4, got {Delta}")
    if not X > 0:
        raise ValueError(f"X must be positive, got {X}")
    if h < 0:
        raise ValueError("h must be >= 0")
    if kind is WindowKind.THETA and h:
        raise ValueError("the THETA window has no shift; use PLATEAU for phi((x - h)/X)")
    return SmoothWindow(kind, float(X), float(Delta), int(h))


# --------------------------------------------------------------------------
# Bessel transforms

class TruncationError(RuntimeError):
    """The dual sum did not decay below the requested level in range."""


@dataclass(frozen=True)
class TransformProfile:
    y_grid: np.ndarray
    values: np.ndarray
    branch: Branch | None = None

    def __post_init__(self):
        if np.any(np.diff(self.y_grid) <= 0):
            raise ValueError("y_grid must be strictly increasing")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("transform values must be finite")


def _bessel(s: float):
    """A fast callable z -> J_s(z) for the orders used here."""
    if s == 0:
        return sp.j0
    if s == 1:
        return sp.j1
    if 2 * s == int(2 * s) and s > 0 and int(2 * s) % 2 == 1:
        n = int(s - 0.5)
        return lambda z: np.sqrt(2 * z / math.pi) * sp.spherical_jn(n, z)
    return lambda z: sp.jv(s, z)


_BATCH = 256


def _batched(R: np.ndarray, one_batch) -> np.ndarray:
    """Apply ``one_batch`` to sorted chunks of R (sharing panels per chunk)."""
    R = np.asarray(R, dtype=float)
    flat = R.reshape(-1)
    order = np.argsort(flat)
    out = np.empty(flat.shape, dtype=complex)
    for i in range(0, len(order), _BATCH):
        idx = order[i : i + _BATCH]
        out[idx] = one_batch(flat[idx])
    return out.reshape(R.shape)


def _panels(window: SmoothWindow, phase: float) -> np.ndarray:
    edges = oscillation_panels(0.5, 1.0, phase, 8)
    u = np.concatenate([edges, (window.breakpoints() - window.shift) / window.X])
    return np.unique(np.clip(u, 0.5, 1.0))


def _unit_W(window, beta, s, R, rtol, atol, derivative=False, order_shift=0):
    """int_{1/2}^1 phi(t) e(beta X t) t^{s/2} J_s(R sqrt t) dt (unit scale).

    With ``order_shift=1`` and ``derivative`` the integrand becomes the one
    of the integrated-by-parts form: phi'(t) or phi(t), times
    (R sqrt t)^{s+1} J_{s+1}(R sqrt t).
    """
    bj = _bessel(s + order_shift)
    X = window.X
    bx = beta * X

    def one(Rb):
        def f(t):
            prof = window.profile(t, 1 if derivative else 0)
            z = Rb[:, None] * np.sqrt(t)
            if order_shift:
                kern = z ** (s + 1) * bj(z)
            else:
                kern = t ** (s / 2) * bj(z)
            return prof * np.exp(2j * math.pi * bx * t) * kern

        phase = Rb.max() * (1 - math.sqrt(0.5)) + math.pi * abs(bx)
        return integrate(f, 0.5, 1.0, rtol=rtol, atol=atol, breakpoints=_panels(window, phase)).value

    return _batched(R, one)


_CHEB_DEG = 40
_CHEB_LEN = 32.0  # R-length of one interpolation piece


def _unit_W_interp(window, beta, s, R, rtol, atol):
    """_unit_W through piecewise Chebyshev interpolation in R.

    As a function of R the transform is a superposition of e(+-R sqrt(t)/2pi)
    with sqrt(t) <= 1, so degree-40 pieces of length 32 resolve it to
    roundoff.  Worth it only when R is dense; otherwise evaluate directly.
    """
    R = np.asarray(R, dtype=float)
    lo, hi = float(R.min()), float(R.max())
    n_pieces = max(1, math.ceil((hi - lo) / _CHEB_LEN))
    if R.size < 2 * n_pieces * (_CHEB_DEG + 1):
        return _unit_W(window, beta, s, R, rtol, atol)
    edges = lo + (hi - lo) * np.arange(n_pieces + 1) / n_pieces
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    k = np.arange(_CHEB_DEG + 1)
    x_nodes = np.cos(math.pi * (k + 0.5) / (_CHEB_DEG + 1))
    nodes = mid[:, None] + half[:, None] * x_nodes[None, :]
    vals = _unit_W(window, beta, s, nodes, rtol, atol)
    # discrete cosine transform of the node values -> Chebyshev coefficients
    T = np.cos(np.outer(k, math.pi * (k + 0.5) / (_CHEB_DEG + 1)))
    coef = vals @ T.T * (2 / (_CHEB_DEG + 1))
    coef[:, 0] /= 2
    piece = np.clip(((R - lo) / (hi - lo) * n_pieces).astype(int), 0, n_pieces - 1)
    x = np.clip((R - mid[piece]) / half[piece], -1, 1)
    V = np.polynomial.chebyshev.chebvander(x, _CHEB_DEG)
    return np.einsum("ij,ij->i", V, coef[piece])


def transform_W(window: SmoothWindow, beta: float, ell: int, y, rtol: float = 1e-10, atol: float = 1e-14):
    """W_beta(y) = int phi(x/X) e(beta x) x^{(l/2-1)/2} J_{l/2-1}(4 pi sqrt(xy)) dx.

    ``atol`` is relative to the trivial size X^{l/4+1/2}.
    """
    if ell < 2:
        raise ValueError("ell must be >= 2")
    if window.kind is not WindowKind.THETA:
        raise ValueError("W transforms use the unshifted THETA window")
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    s = ell / 2 - 1
    X = window.X
    R = 4 * math.pi * np.sqrt(X * y)
    val = X ** (1 + s / 2) * _unit_W(window, beta, s, R, rtol, atol)
    return val if val.ndim else complex(val)


def split_W(window: SmoothWindow, beta: float, ell: int, y, rtol: float = 1e-10, atol: float = 1e-14):
    """(E1, E2) with E1 + E2 = W_beta(y), from one integration by parts.

    With R = 4 pi sqrt(X y) and the unit-scale window,
    E1 = -4 pi i beta X^{l/4+3/2} R^{-l/2-1} int phi(t) e(beta X t) (R sqrt t)^{l/2} J_{l/2}(R sqrt t) dt,
    E2 = -2 X^{l/4+1/2} R^{-l/2-1} int phi'(t) e(beta X t) (R sqrt t)^{l/2} J_{l/2}(R sqrt t) dt.
    """
    s = ell / 2 - 1
    X = window.X
    y = np.asarray(y, dtype=float)
    R = 4 * math.pi * np.sqrt(X * y)
    i1 = _unit_W(window, beta, s, R, rtol, atol, derivative=False, order_shift=1)
    i2 = _unit_W(window, beta, s, R, rtol, atol, derivative=True, order_shift=1)
    pre = R ** (-ell / 2 - 1)
    e1 = -4j * math.pi * beta * X ** (ell / 4 + 1.5) * pre * i1
    e2 = -2 * X ** (ell / 4 + 0.5) * pre * i2
    return e1, e2


def mellin_w(window: SmoothWindow, beta: float, s: float, rtol: float = 1e-12) -> complex:
    """w~_beta(s) = int phi(x/X) e(beta x) x^{s-1} dx."""
    if s <= 0:
        raise ValueError("s must be positive")
    X = window.X
    lo, hi = window.support
    bx = beta

    def f(x):
        return window(x) * np.exp(2j * math.pi * bx * x) * x ** (s - 1)

    edges = np.unique(np.concatenate([oscillation_panels(lo, hi, 2 * math.pi * abs(beta) * (hi - lo), 4), window.breakpoints()]))
    return complex(integrate(f, lo, hi, rtol=rtol, atol=1e-16 * X**s, breakpoints=edges).value)


def transform_V(window: SmoothWindow, beta: float, spec: KernelSpec, y, rtol: float = 1e-10, atol: float = 1e-14):
    """V_beta(y) = int v(x) e(-beta x) H_f(4 pi sqrt(xy)) dx with v the window.

    For the THETA window v(x) = phi(x/X); for PLATEAU v(x) = phi((x-h)/X).
    ``atol`` is relative to the trivial size X.
    """
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    if spec.vanishes:
        out = np.zeros(y.shape, dtype=complex)
        return out if out.ndim else 0j
    X, sh = window.X, window.shift
    R = 4 * math.pi * np.sqrt(X * y)
    holo = spec.form.kind is FormKind.HOLOMORPHIC
    if holo:
        k = spec.form.weight
        bj = _bessel(k - 1)
        const = 2 * math.pi * (1j**k)
    else:
        # one batched kernel tabulation serves every node of every y
        kern_of = kernel_interpolant(spec, float(R.min()) * math.sqrt(0.5 + sh / X), float(R.max()) * math.sqrt(1 + sh / X))

    def one(Rb):
        def f(t):
            arg = Rb[:, None] * np.sqrt(t + sh / X)
            kern = const * bj(arg) if holo else kern_of(arg)
            return window.profile(t) * np.exp(-2j * math.pi * beta * (sh + X * t)) * kern

        phase = Rb.max() * (math.sqrt(1 + sh / X) - math.sqrt(0.5 + sh / X)) + math.pi * abs(beta) * X
        return integrate(f, 0.5, 1.0, rtol=rtol, atol=atol, breakpoints=_panels(window, phase)).value

    val = X * _batched(R, one)
    return val if val.ndim else complex(val)


def transform_profile(window, beta, kernel, y_grid) -> TransformProfile:
    """Tabulate V (``kernel`` a KernelSpec) or W (``kernel`` an integer l) on a grid."""
    y_grid = np.asarray(y_grid, dtype=float)
    if isinstance(kernel, KernelSpec):
        return TransformProfile(y_grid, transform_V(window, beta, kernel, y_grid), kernel.branch)
    return TransformProfile(y_grid, transform_W(window, beta, int(kernel), y_grid), None)


# --------------------------------------------------------------------------
# envelopes

def envelope_V(y, Y: float, j: int = 0, im_mu: float = 0.0):
    """Y (1+sqrt(yY))^{-1/2} (1+1/sqrt(yY))^{2|Im mu|} ((yY)^{-1/2} + (yY)^{-1})^j."""
    z = np.asarray(y, dtype=float) * Y
    r = np.sqrt(z)
    return Y * (1 + r) ** -0.5 * (1 + 1 / r) ** (2 * im_mu) * (1 / r + 1 / z) ** j


def envelope_W(y, Y: float, s: float, j: int = 0, Delta: float = 1.0):
    """Y^{1+s/2} (1+sqrt(yY))^{-1/2} (1+1/sqrt(yY))^{-s} (Delta/(1+sqrt(yY)))^j."""
    r = np.sqrt(np.asarray(y, dtype=float) * Y)
    return Y ** (1 + s / 2) * (1 + r) ** -0.5 * (1 + 1 / r) ** (-s) * (Delta / (1 + r)) ** j


def envelope_W_min(n, q: float, X: float, ell: int):
    """X^{l/4+1/2} min((sqrt(nX)/q)^{l/2-1}, (q/sqrt(nX))^{3/2})."""
    r = np.sqrt(np.asarray(n, dtype=float) * X) / q
    return X ** (ell / 4 + 0.5) * np.minimum(r ** (ell / 2 - 1), r**-1.5)


# --------------------------------------------------------------------------
# two-sided Voronoi checks

@dataclass(frozen=True)
class VoronoiCheck:
    lhs: complex
    rhs: complex
    relerr: float
    main: complex
    dual: complex
    dual_terms: int
    R_max: float
    partial: bool = False  # Maass input without omega: plus branch only


TAIL_TOL = 1e-7
N_DUAL_CAP = 10**6


def _dual_sum(term_block, lhs_scale, R_of_n, Delta: float, tail_tol: float):
    """Sum dual terms block by block until a whole block is negligible.

    ``term_block(n)`` returns an array of shape (k, len(n)): one row per
    twist sharing the same transforms.  Blocks grow geometrically; the sum
    stops once the transform argument has passed 8 Delta and, for every
    row, the block's total absolute size is below tail_tol * lhs_scale.
    """
    lhs_scale = np.atleast_1d(np.asarray(lhs_scale, dtype=float))
    total = np.zeros(len(lhs_scale), dtype=complex)
    start, size = 1, 64
    while True:
        if start > N_DUAL_CAP:
            raise TruncationError(f"dual sum not negligible by n = {N_DUAL_CAP}")
        n = np.arange(start, min(start + size, N_DUAL_CAP + 1), dtype=np.int64)
        terms = term_block(n)
        total += terms.sum(axis=1)
        start += len(n)
        if R_of_n(n[-1]) > 8 * Delta and np.all(np.abs(terms).sum(axis=1) <= tail_tol * lhs_scale):
            return total, int(n[-1]), float(R_of_n(n[-1]))
        size = int(size * 1.25)


def _units_or(a_values, q: int) -> list[int]:
    if a_values is None:
        return [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    a_values = [int(a) for a in np.atleast_1d(a_values)]
    for a in a_values:
        if q < 1 or math.gcd(a, q) != 1:
            raise ValueError(f"need q >= 1 and (a, q) = 1, got a={a}, q={q}")
    return a_values


def _resolve_variant(variant: str, q: int) -> str:
    if variant == "auto":
        if q % 4 == 0:
            return "level4"
        if q % 2 == 1:
            return "odd"
        raise ValueError(f"q = {q} = 2 (mod 4) is not supported")
    if variant not in ("odd", "level4"):
        raise ValueError(f"unknown variant {variant!r}")
    if variant == "odd" and q % 2 == 0:
        raise ValueError("the odd-modulus form needs odd q")
    return variant


def _checks(lhs, main, dual, n_used, R_max, partial=False) -> list[VoronoiCheck]:
    rhs = main + dual
    return [
        VoronoiCheck(complex(l), complex(r), abs(l - r) / abs(l), complex(m), complex(du), n_used, R_max, partial)
        for l, r, m, du in zip(lhs, rhs, main, dual)
    ]


def voronoi_r_all(
    ell: int,
    q: int,
    window: SmoothWindow,
    a_values=None,
    beta: float = 0.0,
    tail_tol: float = TAIL_TOL,
    variant: str = "auto",
) -> list[VoronoiCheck]:
    """Both sides of the Voronoi formula for r_l twisted by e(an/q), for many a.

    w(x) = phi(x/X) e(beta x).  Two dual forms are implemented:

    * ``"level4"`` for 4 | q, with multiplier ((q/d) eps_d^{-1})^l, dual phase
      e(-dn/q) and transform W(n/q^2), normalized by (2 pi i/q)^{l/2} and
      2 pi i^{l/2}/q;
    * ``"odd"`` for odd q, from Poisson summation over each residue class:
      multiplier (a/q)^l eps_q^l q^{-l/2}, main term pi^{l/2}/Gamma(l/2) w~(l/2),
      dual pi sum r(n) e(-4bar d n/q) (sqrt(n)/q)^{1-l/2} W(n/(4q^2)).

    ``"auto"`` picks the form matching q; q = 2 (mod 4) is unsupported.
    Forcing ``"level4"`` on odd q evaluates the level-4 expression anyway
    (useful to see that it does not hold there).  The Bessel transforms do
    not depend on a, so every a in ``a_values`` (default: all units mod q)
    shares one dual-sum evaluation.
    """
    if ell < 2:
        raise ValueError("ell must be >= 2")
    a_values = _units_or(a_values, q)
    variant = _resolve_variant(variant, q)
    if window.kind is not WindowKind.THETA:
        raise ValueError("use the THETA window")

    X = window.X
    lo, hi = window.support
    n_hi = int(math.floor(hi))
    table = repr_count(ell, n_hi).values
    n = np.arange(int(math.ceil(lo)), n_hi + 1, dtype=np.int64)
    w = table[n] * window(n) * np.exp(2j * math.pi * beta * n)
    A = np.array(a_values, dtype=np.int64)
    lhs = (np.exp(2j * math.pi * ((A[:, None] * n[None, :]) % q) / q) * w).sum(axis=1)

    d = np.array([mod_inverse(int(a), q) for a in A], dtype=np.int64)
    s = ell / 2 - 1
    w_tilde = mellin_w(window, beta, ell / 2)
    bj_scale = X ** (1 + s / 2)
    if variant == "odd":
        mult = np.array([(jacobi_symbol(int(a), q) * epsilon_unit(q)) ** ell for a in A]) * q ** (-ell / 2)
        main = mult * math.pi ** (ell / 2) / math.gamma(ell / 2) * w_tilde
        dual_d = (mod_inverse(4, q) * d) % q
        R_scale = 2 * math.pi / q
        pref = mult * math.pi

        def weight(m):
            return (np.sqrt(m) / q) ** (1 - ell / 2)

    else:
        # least positive inverse; for (forced) odd q an even d is replaced by d + q
        d_odd = [int(x) if x % 2 else int(x) + q for x in d]
        mult = np.array([(jacobi_symbol(q, x) / epsilon_unit(x)) ** ell for x in d_odd])
        main = (2j * math.pi / q) ** (ell / 2) / math.gamma(ell / 2) * mult * w_tilde
        dual_d = d % q
        R_scale = 4 * math.pi / q
        pref = 2 * math.pi * (1j ** (ell / 2)) / q * mult

        def weight(m):
            return m ** ((1 - ell / 2) / 2)

    def R_of_n(m):
        return R_scale * np.sqrt(m * X)

    cache = [table]

    def terms(m):
        if m[-1] >= len(cache[0]):
            cache[0] = repr_count(ell, max(int(m[-1]), 4 * len(cache[0]))).values
        r = cache[0][m]
        keep = r != 0
        m, r = m[keep], r[keep]
        if not len(m):
            return np.zeros((len(A), 0), dtype=complex)
        common = r * weight(m) * bj_scale * _unit_W_interp(window, beta, s, R_of_n(m), 1e-10, 1e-14)
        phase = np.exp(-2j * math.pi * ((dual_d[:, None] * m[None, :]) % q) / q)
        return pref[:, None] * phase * common[None, :]

    dual, n_used, R_max = _dual_sum(terms, np.abs(lhs), R_of_n, window.Delta, tail_tol)
    return _checks(lhs, main, dual, n_used, R_max)


def verify_voronoi_r(
    ell: int,
    a: int,
    q: int,
    window: SmoothWindow,
    beta: float = 0.0,
    tail_tol: float = TAIL_TOL,
    variant: str = "auto",
) -> VoronoiCheck:
    """Single-a version of :func:`voronoi_r_all`."""
    return voronoi_r_all(ell, q, window, [a], beta, tail_tol, variant)[0]


def voronoi_f_all(
    table: CoefficientTable,
    q: int,
    window: SmoothWindow,
    a_values=None,
    beta: float = 0.0,
    tail_tol: float = TAIL_TOL,
    character=None,
) -> list[VoronoiCheck]:
    """Both sides of the Voronoi formula for lambda_f twisted by e(an/q), for many a.

    v(x) = window(x) e(-beta x).  The right side is
    chi(d)/q sum lambda(n) e(-dn/q) V+(n/q^2), plus for Maass forms with a
    known constant omega the minus branch
    omega Gamma(1/2+i mu-k/2)/Gamma(1/2+i mu+k/2) chi(d)/q sum lambda(n) e(dn/q) V-(n/q^2).
    ``character`` maps d to chi_D(d) (trivial by default).
    """
    a_values = _units_or(a_values, q)
    spec = table.spec
    if q % spec.level:
        raise ValueError(f"q must be a multiple of the level {spec.level}")
    lam = np.asarray(table.lam)
    lo, hi = window.support
    n_hi = int(math.floor(hi))
    if n_hi > table.n_max:
        raise ValueError(f"table reaches n = {table.n_max}, window needs {n_hi}")
    n = np.arange(max(1, int(math.ceil(lo))), n_hi + 1, dtype=np.int64)
    v = lam[n] * window(n) * np.exp(-2j * math.pi * beta * n)
    A = np.array(a_values, dtype=np.int64)
    lhs = (np.exp(2j * math.pi * ((A[:, None] * n[None, :]) % q) / q) * v).sum(axis=1)

    d = np.array([mod_inverse(int(a), q) for a in A], dtype=np.int64) % q
    chi = np.array([1 if character is None else character(int(x)) for x in d], dtype=complex)
    X = window.X
    plus = KernelSpec(spec, Branch.PLUS)
    minus = KernelSpec(spec, Branch.MINUS)
    use_minus = spec.kind is FormKind.MAASS and spec.omega is not None
    if use_minus:
        mu, k = spec.spectral_mu, spec.weight
        coef_minus = spec.omega * sp.gamma(0.5 + 1j * mu - k / 2) / sp.gamma(0.5 + 1j * mu + k / 2)

    def R_of_n(m):
        return 4 * math.pi * np.sqrt(m * X) / q

    def terms(m):
        if m[-1] > table.n_max:
            raise ValueError(f"dual sum needs lambda(n) up to n = {m[-1]}, table stops at {table.n_max}")
        y = m / q**2
        phase = np.exp(-2j * math.pi * ((d[:, None] * m[None, :]) % q) / q)
        out = phase * (lam[m] * transform_V(window, beta, plus, y))[None, :]
        if use_minus:
            out = out + coef_minus * phase.conj() * (lam[m] * transform_V(window, beta, minus, y))[None, :]
        return (chi / q)[:, None] * out

    dual, n_used, R_max = _dual_sum(terms, np.abs(lhs), R_of_n, window.Delta, tail_tol)
    partial = spec.kind is FormKind.MAASS and spec.omega is None
    return _checks(lhs, np.zeros(len(A), dtype=complex), dual, n_used, R_max, partial)


def verify_voronoi_f(
    table: CoefficientTable,
    a: int,
    q: int,
    window: SmoothWindow,
    beta: float = 0.0,
    tail_tol: float = TAIL_TOL,
    character=None,
) -> VoronoiCheck:
    """Single-a version of :func:`voronoi_f_all`."""
    return voronoi_f_all(table, q, window, [a], beta, tail_tol, character)[0]
