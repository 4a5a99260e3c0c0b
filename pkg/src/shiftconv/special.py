"""Special functions and the shared quadrature engine.

The engine is a vectorized adaptive Gauss-Kronrod (7/15) integrator: all
active panels are evaluated in one call of the integrand, and integrands
may return a batch of values per node (shape ``(..., len(x))``) so that a
whole family of related integrals shares one panel set.  Oscillatory
integrands get their starting panels from a phase bound, half a period per
panel.

Bessel functions of real order come from scipy.  Imaginary-order
functions needed by Maass kernels are computed here by quadrature along
shifted contours, which keeps the integrands free of catastrophic
cancellation for orders up to about 30.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .coeffs import FormKind, FormSpec
from .expsums import gauss_sum

# --------------------------------------------------------------------------
# Gauss-Kronrod 7/15 rule on [-1, 1]

_XK = np.array(
    [
        -0.991455371120812639206854697526329,
        -0.949107912342758524526189684047851,
        -0.864864423359769072789712788640926,
        -0.741531185599394439863864773280788,
        -0.586087235467691130294144845693013,
        -0.405845151377397166906606412076961,
        -0.207784955007898467600689403773245,
        0.0,
        0.207784955007898467600689403773245,
        0.405845151377397166906606412076961,
        0.586087235467691130294144845693013,
        0.741531185599394439863864773280788,
        0.864864423359769072789712788640926,
        0.949107912342758524526189684047851,
        0.991455371120812639206854697526329,
    ]
)
_WK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
        0.204432940075298892414161999234649,
        0.190350578064785409913256402421014,
        0.169004726639267902826583426598550,
        0.140653259715525918745189590510238,
        0.104790010322250183839876322541518,
        0.063092092629978553290700663189204,
        0.022935322010529224963732008058970,
    ]
)
_WG = np.zeros(15)
_WG[1::2] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class AccuracyWarning(UserWarning):
    """An argument lies outside the range with documented accuracy."""


@dataclass(frozen=True)
class QuadResult:
    value: complex | np.ndarray
    error: float | np.ndarray
    n_panels: int
    n_evals: int


def oscillation_panels(a: float, b: float, total_phase: float, min_panels: int = 1) -> np.ndarray:
    """Breakpoints splitting [a, b] into panels of at most half a period.

    ``total_phase`` is an upper bound (in radians) for the variation of the
    integrand's phase over [a, b].
    """
    n = max(min_panels, int(math.ceil(abs(total_phase) / math.pi)))
    return np.linspace(a, b, n + 1)


def integrate(
    f,
    a: float,
    b: float,
    *,
    rtol: float = 1e-10,
    atol: float = 0.0,
    breakpoints=None,
    max_panels: int = 400_000,
    max_rounds: int = 60,
) -> QuadResult:
    """Adaptive Gauss-Kronrod quadrature of f over [a, b].

    ``f`` takes a 1-d array of nodes and returns values of shape
    ``(..., len(x))``; every leading index is a separate integral computed
    on a shared set of panels.  A panel is accepted when, for every batch
    member, its error estimate is within its share (by length) of
    ``max(atol, rtol * |I|)``.

    ``breakpoints`` (a sorted array including a and b) seeds the panels;
    use :func:`oscillation_panels` for oscillatory integrands.
    """
    if not b > a:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    edges = np.asarray(breakpoints if breakpoints is not None else [a, b], dtype=float)
    lo, hi = edges[:-1], edges[1:]
    length = b - a
    total = None
    err_total = None
    n_evals = 0
    n_panels = 0
    for _ in range(max_rounds):
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        x = (mid[:, None] + half[:, None] * _XK[None, :]).ravel()
        fx = np.asarray(f(x))
        n_evals += x.size
        fx = fx.reshape(fx.shape[:-1] + (len(lo), 15))
        kron = (fx * _WK).sum(axis=-1) * half
        gauss = (fx * _WG).sum(axis=-1) * half
        # QUADPACK-style estimate: |K - G| overstates the Kronrod error once
        # the panel is resolved; the floor keeps roundoff from blocking acceptance.
        scale = (np.abs(fx) * _WK).sum(axis=-1) * half
        raw = np.abs(kron - gauss)
        with np.errstate(divide="ignore", invalid="ignore"):
            err = np.where(scale > 0, scale * np.minimum(1.0, (200 * raw / scale) ** 1.5), raw)
        err = np.maximum(err, 50 * np.finfo(float).eps * scale)
        floor = err <= 50 * np.finfo(float).eps * scale * 1.0000001
        if total is None:
            total = np.zeros(kron.shape[:-1], dtype=kron.dtype)
            err_total = np.zeros(kron.shape[:-1])
        estimate = total + kron.sum(axis=-1)
        tol = np.maximum(atol, rtol * np.abs(estimate))
        share = (hi - lo) / length
        ok = np.all((err <= tol[..., None] * share + 1e-300) | floor, axis=tuple(range(err.ndim - 1)))
        tiny = (hi - lo) < 1e-13 * length
        if np.any(tiny & ~ok):
            # a panel this short that still misses its tolerance signals a singularity
            raise QuadratureError(f"non-integrable behaviour near x = {mid[tiny & ~ok][0]:.17g} on [{a}, {b}]")
        total = total + kron[..., ok].sum(axis=-1)
        err_total = err_total + err[..., ok].sum(axis=-1)
        n_panels += int(ok.sum())
        if ok.all():
            return QuadResult(_scalarize(total), _scalarize(err_total), n_panels, n_evals)
        lo, hi, mid = lo[~ok], hi[~ok], mid[~ok]
        if n_panels + 2 * len(lo) > max_panels:
            break
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    raise QuadratureError(
        f"no convergence on [{a}, {b}] after {n_evals} evaluations ({len(lo)} panels pending)"
    )


def _scalarize(v):
    v = np.asarray(v)
    return v.item() if v.ndim == 0 else v


# --------------------------------------------------------------------------
# Bessel functions of real order

def _check_positive(x):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("Bessel arguments must be positive")
    return x


def bessel_j(s: float, x):
    """J_s(x) for real s >= 0 and x > 0."""
    if s < 0:
        raise ValueError(f"order must be >= 0, got {s}")
    return sp.jv(s, _check_positive(x))


def bessel_y(s: float, x):
    """Y_s(x) for real s >= 0 and x > 0."""
    if s < 0:
        raise ValueError(f"order must be >= 0, got {s}")
    return sp.yv(s, _check_positive(x))


def _phase(s, x):
    return x - 0.5 * math.pi * s - 0.25 * math.pi


def bessel_j_asymptotic(s: float, x):
    """Two-term large-x expansion of J_s (error O(x^-5/2))."""
    x = _check_positive(x)
    w = _phase(s, x)
    return np.sqrt(2 / (math.pi * x)) * (np.cos(w) - (4 * s * s - 1) / (8 * x) * np.sin(w))


def bessel_y_asymptotic(s: float, x):
    """Two-term large-x expansion of Y_s (error O(x^-5/2))."""
    x = _check_positive(x)
    w = _phase(s, x)
    return np.sqrt(2 / (math.pi * x)) * (np.sin(w) + (4 * s * s - 1) / (8 * x) * np.cos(w))


def bessel_k_asymptotic(s, x):
    """Leading term sqrt(pi/(2x)) e^(-x) of K_s (relative error O(1/x))."""
    x = _check_positive(x)
    return np.sqrt(math.pi / (2 * x)) * np.exp(-x)


# --------------------------------------------------------------------------
# imaginary order

_LOW_X = 1e-2
_TAIL = 45.0  # integrands are cut where they fall e^-45 below their peak


def _chunks(xs: np.ndarray, size: int = 128, spread: float = 4.0):
    """Index groups of sorted x with bounded size and max/min ratio."""
    order = np.argsort(xs)
    i = 0
    while i < len(order):
        j = i + 1
        while j < len(order) and j - i < size and xs[order[j]] <= spread * xs[order[i]]:
            j += 1
        yield order[i:j]
        i = j


def _k_imag_batch(nu: float, x: np.ndarray, rtol: float) -> np.ndarray:
    # K_{i nu}(x) = Re int_0^inf exp(-x cosh(t + i a) + i nu (t + i a)) dt for
    # |a| < pi/2 (shift of the symmetric full-line integral).  Choosing a near
    # the saddle removes the e^{-pi nu / 2} cancellation of the real-line form.
    # Each row is mapped onto u in [0, 1] so that one panel set serves the batch.
    nu = abs(nu)
    cap = 0.5 * math.pi - 1.0 / (nu + 1.0)
    alpha = np.minimum(np.arcsin(np.minimum(nu / x, 1.0)), cap)
    c, s = np.cos(alpha), np.sin(alpha)
    t_max = np.arccosh(1.0 + _TAIL / (x * c))

    def g(u):
        t = t_max[:, None] * u[None, :]
        expo = -(x * c)[:, None] * np.cosh(t) - (nu * alpha)[:, None] + 1j * (nu * t - (x * s)[:, None] * np.sinh(t))
        return np.exp(expo).real * t_max[:, None]

    phase = float(np.max(nu * t_max + x * s * np.sinh(t_max)))
    return np.atleast_1d(integrate(g, 0.0, 1.0, rtol=rtol, breakpoints=oscillation_panels(0.0, 1.0, phase, 4)).value)


def bessel_k_imag(nu: float, x, rtol: float = 1e-10):
    """K_{i nu}(x) for real nu and x > 0 (real valued).

    Relative accuracy about 1e-9 away from zeros; for x < 1e-2 an
    :class:`AccuracyWarning` is issued.
    """
    import warnings

    xs = _check_positive(x)
    if np.any(xs < _LOW_X):
        warnings.warn("bessel_k_imag below x = 1e-2 is outside the documented range", AccuracyWarning, stacklevel=2)
    flat = np.atleast_1d(xs).ravel().astype(float)
    out = np.empty(flat.shape)
    for idx in _chunks(flat):
        out[idx] = _k_imag_batch(float(nu), flat[idx], rtol)
    return out.reshape(np.shape(xs)) if np.ndim(xs) else float(out[0])


def _cosh_fourier(nu: float, x: np.ndarray, rtol: float) -> np.ndarray:
    # I(x, nu) = int_0^inf exp(i x cosh w) cos(nu w) dw, conditionally
    # convergent on the real axis.  Move the path to Im w = a (0 < a <= pi/2)
    # via a vertical leg: I = i int_0^a e^{i x cos t} cosh(nu t) dt
    #                        + int_0^inf e^{i x cosh(t + i a)} cos(nu (t + i a)) dt.
    nu = abs(nu)
    alpha = min(0.5 * math.pi, 1.0 / max(nu, 1e-300))
    c, s = math.cos(alpha), math.sin(alpha)

    def leg(t):
        return 1j * np.exp(1j * x[:, None] * np.cos(t)[None, :]) * np.cosh(nu * t)[None, :]

    v = integrate(leg, 0.0, alpha, rtol=rtol, breakpoints=oscillation_panels(0.0, alpha, float(x.max()) * alpha, 2))
    t_max = np.arcsinh(_TAIL / (x * s)) + 1.0

    def line(u):
        w = t_max[:, None] * u[None, :] + 1j * alpha
        return np.exp(1j * x[:, None] * np.cosh(w)) * np.cos(nu * w) * t_max[:, None]

    phase = float(np.max(x * c * np.cosh(t_max) + nu * t_max))
    h = integrate(line, 0.0, 1.0, rtol=rtol, breakpoints=oscillation_panels(0.0, 1.0, phase, 4))
    return np.atleast_1d(v.value) + np.atleast_1d(h.value)


def bessel_y_imag_pair(nu: float, x, sign: int = 1, rtol: float = 1e-10):
    """Y_{i nu}(x) + sign * Y_{-i nu}(x), divided by cosh(pi nu/2) (sign = +1)
    or by sinh(pi nu/2) (sign = -1).

    Uses Y_{i nu}(x) + Y_{-i nu}(x) = -(4/pi) cosh(pi nu/2) Re I(x, nu) and
    Y_{i nu}(x) - Y_{-i nu}(x) = -(4i/pi) sinh(pi nu/2) Im I(x, nu) with I as in
    :func:`_cosh_fourier`.  The normalization is the one the Maass kernels
    need and avoids overflow for large nu.  Documented for x >= 1.
    """
    import warnings

    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    xs = _check_positive(x)
    if np.any(xs < 1.0):
        warnings.warn("bessel_y_imag_pair below x = 1 is outside the documented range", AccuracyWarning, stacklevel=2)
    flat = np.atleast_1d(xs).ravel().astype(float)
    out = np.empty(flat.shape, dtype=float if sign == 1 else complex)
    for idx in _chunks(flat):
        i_val = _cosh_fourier(float(nu), flat[idx], rtol)
        out[idx] = -4 / math.pi * i_val.real if sign == 1 else -4j / math.pi * i_val.imag
    return out.reshape(np.shape(xs)) if np.ndim(xs) else out[0]


# --------------------------------------------------------------------------
# Voronoi kernels

class Branch(enum.Enum):
    PLUS = "+"
    MINUS = "-"


@dataclass(frozen=True)
class KernelSpec:
    form: FormSpec
    branch: Branch = Branch.PLUS

    @property
    def vanishes(self) -> bool:
        return self.form.kind is FormKind.HOLOMORPHIC and self.branch is Branch.MINUS


def kernel_H(spec: KernelSpec, x):
    """The Voronoi kernel H_f^{+/-}(x).

    Holomorphic weight k: H+ = 2 pi i^k J_{k-1}, H- = 0.
    Maass, even weight: H+ = -pi/cosh(pi mu) (Y_{2i mu} + Y_{-2i mu}),
    H- = 4 cosh(pi mu) K_{2i mu}.
    Maass, odd weight: H+ = pi/sinh(pi mu) (Y_{2i mu} - Y_{-2i mu}),
    H- = -4i sinh(pi mu) K_{2i mu}.
    """
    form = spec.form
    xs = _check_positive(x)
    if form.kind is FormKind.HOLOMORPHIC:
        if spec.branch is Branch.MINUS:
            return np.zeros_like(xs, dtype=complex) if np.ndim(xs) else 0j
        k = form.weight
        return 2 * math.pi * (1j**k) * bessel_j(k - 1, xs)
    mu = form.spectral_mu
    nu = 2 * mu
    even = form.weight % 2 == 0
    if spec.branch is Branch.PLUS:
        # the pair helper already divides by cosh(pi mu) resp. sinh(pi mu)
        if even:
            return -math.pi * bessel_y_imag_pair(nu, xs, sign=1) + 0j
        return math.pi * bessel_y_imag_pair(nu, xs, sign=-1)
    k_val = bessel_k_imag(nu, xs)
    if even:
        return 4 * math.cosh(math.pi * mu) * k_val + 0j
    return -4j * math.sinh(math.pi * mu) * k_val


_KI_DEG = 24


def kernel_interpolant(spec: KernelSpec, x_lo: float, x_hi: float):
    """Piecewise Chebyshev interpolant of H_f on [x_lo, x_hi].

    Pieces have length at most 4 above x = 8 (where H oscillates like e^{ix})
    and ratio at most 1.25 below it (where x^{+/- 2 i mu} oscillates in log x).
    All nodes go through one batched :func:`kernel_H` call.
    """
    if not 0 < x_lo < x_hi:
        raise ValueError("need 0 < x_lo < x_hi")
    edges = [x_lo]
    while edges[-1] < x_hi:
        e = edges[-1]
        edges.append(min(x_hi, e * 1.25 if e < 8 else e + 4.0))
    edges = np.array(edges)
    k = np.arange(_KI_DEG + 1)
    nodes = np.cos(np.pi * (k + 0.5) / (_KI_DEG + 1))
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * (edges[1:] - edges[:-1])
    vals = np.asarray(kernel_H(spec, mid[:, None] + half[:, None] * nodes[None, :]), dtype=complex)
    # coefficients from values at Chebyshev points of the first kind
    basis = np.cos(np.outer(k, np.pi * (k + 0.5) / (_KI_DEG + 1))) * (2.0 / (_KI_DEG + 1))
    basis[0] *= 0.5
    coef = vals @ basis.T  # (pieces, deg + 1)

    def H(x):
        x = np.asarray(x, dtype=float)
        if np.any((x < x_lo * (1 - 1e-12)) | (x > x_hi * (1 + 1e-12))):
            raise ValueError("argument outside the interpolation range")
        j = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(mid) - 1)
        t = (x - mid[j]) / half[j]
        return np.polynomial.chebyshev.chebval(t, np.moveaxis(coef[j], -1, 0), tensor=False)

    return H


def kernel_asymptotic_constants(form: FormSpec) -> dict[str, complex]:
    """c1^{+/-}, c2^{+/-} in H+(4 pi sqrt(xy)) ~ sum (xy)^(-1/4) c1 e(+-2 sqrt(xy))
    + (xy)^(-3/4) c2 e(+-2 sqrt(xy)), derived from the two-term J expansion.

    Holomorphic forms only: with s = k - 1 and w0 = pi s/2 + pi/4,
    c1^{+/-} = i^k e^{-/+ i w0} / sqrt(2) and
    c2^{+/-} = +/- i^(k+1) (4 s^2 - 1) e^{-/+ i w0} / (32 sqrt(2) pi).
    """
    if form.kind is not FormKind.HOLOMORPHIC:
        raise NotImplementedError("kernel constants are derived for holomorphic forms only")
    k = form.weight
    s = k - 1
    w0 = 0.5 * math.pi * s + 0.25 * math.pi
    ik = 1j**k
    c1p = ik * np.exp(-1j * w0) / math.sqrt(2)
    c1m = ik * np.exp(1j * w0) / math.sqrt(2)
    c2p = 1j * ik * (4 * s * s - 1) * np.exp(-1j * w0) / (32 * math.sqrt(2) * math.pi)
    c2m = -1j * ik * (4 * s * s - 1) * np.exp(1j * w0) / (32 * math.sqrt(2) * math.pi)
    return {"c1+": complex(c1p), "c1-": complex(c1m), "c2+": complex(c2p), "c2-": complex(c2m)}


def kernel_H_asymptotic(form: FormSpec, x):
    """Two-term oscillatory form of H+(x), written with xy = (x / 4 pi)^2."""
    c = kernel_asymptotic_constants(form)
    x = _check_positive(x)
    xy4 = np.sqrt(x / (4 * math.pi))  # (xy)^(1/4)
    ep, em = np.exp(1j * x), np.exp(-1j * x)
    return (c["c1+"] * ep + c["c1-"] * em) / xy4 + (c["c2+"] * ep + c["c2-"] * em) / xy4**3


# --------------------------------------------------------------------------
# theta sums and the Fresnel-type integral

def phi0(beta: float, X: float, rtol: float = 1e-12) -> complex:
    """Phi_0(beta) = int_0^sqrt(X) e(beta x^2) dx by adaptive quadrature."""
    if X <= 0:
        raise ValueError("X must be positive")
    r = math.sqrt(X)
    if beta == 0:
        return complex(r)
    # one panel per full turn of the phase beta x^2, which speeds up with x
    cycles = abs(beta) * X
    step = max(1, math.ceil(cycles / 200_000))
    edges = np.sqrt(np.arange(0, math.floor(cycles) + 1, step) / abs(beta))
    edges = np.unique(np.append(edges[edges < r], r))
    # a phase of size 2 pi |beta| X carries roundoff of that many ulps
    atol = r * max(1e-14, 64 * np.finfo(float).eps * cycles)
    res = integrate(lambda x: np.exp(2j * math.pi * beta * x * x), 0.0, r, rtol=rtol, atol=atol, breakpoints=edges)
    return complex(res.value)


def _theta_range(X: float) -> int:
    if X < 0:
        raise ValueError("X must be non-negative")
    return math.isqrt(math.floor(X))


def theta_sum_F(alpha, X: float, *, a: int | None = None, q: int | None = None):
    """F(alpha) = sum_{|m| <= sqrt(X)} e(alpha m^2), by direct summation.

    If ``a`` and ``q`` are given, ``alpha`` is read as beta in a/q + beta and
    the a m^2 / q part of the phase is reduced exactly.
    """
    M = _theta_range(X)
    m = np.arange(1, M + 1, dtype=np.int64)
    m2 = m * m
    alpha = np.asarray(alpha, dtype=float)
    flat = alpha.reshape(-1)
    out = np.empty(flat.shape, dtype=complex)
    exact = 0.0 if a is None else ((a % q) * (m2 % q) % q) / q
    chunk = max(1, 4_000_000 // max(M, 1))
    for i in range(0, len(flat), chunk):
        ph = np.mod(flat[i : i + chunk, None] * m2[None, :], 1.0) + exact
        out[i : i + chunk] = 1 + 2 * np.exp(2j * math.pi * ph).sum(axis=1)
    return out.reshape(alpha.shape) if alpha.ndim else complex(out[0])


@dataclass(frozen=True)
class MajorArcApprox:
    approx: complex
    actual: complex
    residual: float


def theta_major_arc(a: int, q: int, beta: float, X: float, Q: int | None = None) -> MajorArcApprox:
    """Compare F(a/q + beta) with 2 G(a,0;q) Phi_0(beta) / q on a major arc.

    Requires (a, q) = 1, q <= Q and |beta| <= 1/(qQ), with Q = floor(5 sqrt X)
    unless given.
    """
    Q = int(5 * math.sqrt(X)) if Q is None else Q
    if math.gcd(a, q) != 1 or not 1 <= q <= Q:
        raise ValueError(f"need (a, q) = 1 and 1 <= q <= Q = {Q}; got a={a}, q={q}")
    if abs(beta) > 1 / (q * Q) * (1 + 1e-12):
        raise ValueError(f"|beta| = {abs(beta)} exceeds 1/(qQ) = {1 / (q * Q)}")
    approx = 2 * gauss_sum(a, 0, q) * phi0(beta, X) / q
    actual = theta_sum_F(beta, X, a=a, q=q)
    return MajorArcApprox(approx, actual, abs(actual - approx))
