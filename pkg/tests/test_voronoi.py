from __future__ import annotations

import math

import numpy as np
import pytest

from shiftconv.coeffs import CoefficientTable, FormKind, FormSpec
from shiftconv.special import Branch, KernelSpec, integrate
from shiftconv.voronoi import (
    SmoothWindow,
    TransformProfile,
    WindowKind,
    envelope_W_min,
    make_window,
    mellin_w,
    split_W,
    transform_V,
    transform_W,
    verify_voronoi_f,
    verify_voronoi_r,
    voronoi_f_all,
    voronoi_r_all,
)

# --------------------------------------------------------------------------
# windows


def test_window_values():
    w = make_window("theta", 1000.0, 8.0)
    assert w(750.0) == 1.0
    assert w(500.0) == 0.0 and w(1000.0) == 0.0
    assert w(400.0) == 0.0 and w(1200.0) == 0.0
    p_lo, p_hi = w.plateau
    assert p_lo == pytest.approx(625.0) and p_hi == pytest.approx(875.0)
    assert np.all(w(np.linspace(p_lo, p_hi, 50)) == 1.0)


@pytest.mark.parametrize("Delta", [4.5, 8.0, 32.0])
def test_window_mass(Delta):
    X = 1000.0
    w = make_window("theta", X, Delta)
    mass = integrate(lambda x: w(x), X / 2, X, rtol=1e-12, breakpoints=w.breakpoints()).value
    assert X / 2 * (1 - 4 / Delta) <= mass <= X / 2
    assert mellin_w(w, 0.0, 1.0) == pytest.approx(mass, rel=1e-10)


def test_window_derivatives_by_differences():
    w = make_window("theta", 100.0, 6.0)
    x = np.linspace(51.0, 99.0, 37)
    h = 1e-4
    for j in range(4):
        fd = (w(x + h, j) - w(x - h, j)) / (2 * h)
        exact = w(x, j + 1)
        assert np.max(np.abs(fd - exact)) <= 1e-6 * np.max(np.abs(exact))


def test_window_smooth_at_edges():
    w = make_window("theta", 1.0, 8.0)
    for x in (0.5, 1.0, 0.625, 0.875):
        for j in range(5):
            assert abs(w(x - 1e-9, j) - w(x + 1e-9, j)) <= 1e-4 * 8.0**j


def test_plateau_window_is_shifted():
    theta = make_window("theta", 200.0, 8.0)
    plateau = make_window(WindowKind.PLATEAU, 200.0, 8.0, h=17)
    x = np.linspace(100, 200, 11)
    assert np.allclose(plateau(x + 17), theta(x))
    assert plateau.support == (117.0, 217.0)


def test_window_errors():
    with pytest.raises(ValueError):
        make_window("theta", 100.0, 4.0)
    with pytest.raises(ValueError):
        make_window("theta", 0.0, 8.0)
    with pytest.raises(ValueError):
        make_window("theta", 100.0, 8.0, h=3)


def test_profile_validation():
    with pytest.raises(ValueError):
        TransformProfile(np.array([1.0, 1.0]), np.array([0j, 0j]))
    with pytest.raises(ValueError):
        TransformProfile(np.array([1.0, 2.0]), np.array([0j, np.nan]))


# --------------------------------------------------------------------------
# transforms


def direct_W(window, beta, ell, y):
    """Plain quadrature on a fine fixed grid of panels, independent of the transform code."""
    from scipy.special import jv

    s = ell / 2 - 1
    lo, hi = window.support
    f = lambda x: window(x) * np.exp(2j * math.pi * beta * x) * x ** (s / 2) * jv(s, 4 * math.pi * np.sqrt(x * y))
    return integrate(f, lo, hi, rtol=1e-12, breakpoints=np.linspace(lo, hi, 401)).value


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_W_matches_direct_quadrature(ell):
    w = make_window("theta", 500.0, 8.0)
    for y in (1e-4, 0.01, 0.3, 2.0):
        for beta in (0.0, 1e-3):
            got = transform_W(w, beta, ell, y)
            ref = direct_W(w, beta, ell, y)
            assert abs(got - ref) <= 1e-6 * max(abs(ref), 1e-9 * 500 ** (ell / 4 + 0.5))


def test_W_small_y_limit():
    w = make_window("theta", 300.0, 8.0)
    assert transform_W(w, 2e-3, 2, 1e-12) == pytest.approx(mellin_w(w, 2e-3, 1.0), rel=1e-6)


def test_W_beta_within_factor_two():
    X = 1000.0
    w = make_window("theta", X, 8.0)
    # pointwise before the kernel starts to oscillate, sup norms over blocks after
    y = np.logspace(-7, -5, 10)
    base = np.abs(transform_W(w, 0.0, 2, y))
    blocks = [np.linspace(10**k, 10 ** (k + 0.5), 200) for k in (-4.5, -4, -3.5, -3, -2.5)]
    for beta in (1 / X, -0.5 / X):
        ratio = np.abs(transform_W(w, beta, 2, y)) / base
        assert np.all((ratio <= 2) & (ratio >= 0.5))
        for yb in blocks:
            r = np.abs(transform_W(w, beta, 2, yb)).max() / np.abs(transform_W(w, 0.0, 2, yb)).max()
            assert 0.5 <= r <= 2


def test_split_W():
    X = 800.0
    w = make_window("theta", X, 8.0)
    rng = np.random.default_rng(11)
    for _ in range(20):
        y = 10 ** rng.uniform(-4, 0)
        beta = rng.uniform(-1, 1) / X
        e1, e2 = split_W(w, beta, 3, y)
        direct = transform_W(w, beta, 3, y)
        assert abs(e1 + e2 - direct) <= 1e-6 * max(abs(direct), 1e-8 * X ** (3 / 4 + 0.5))


@pytest.mark.parametrize("ell", [2, 3, 4])
def test_W_min_envelope_constant(ell):
    X = 1000.0
    q = 3
    w = make_window("theta", X, 8.0)
    r = np.logspace(-1, 1.5, 40)
    y = (r * q) ** 2 / X / q**2  # dimensionless grid in sqrt(yX) = r
    vals = np.abs(transform_W(w, 0.0, ell, y))
    ratio = vals / envelope_W_min(y * q**2, q, X, ell)
    assert ratio.max() < 10


def test_V_minus_branch_vanishes_for_holomorphic():
    w = make_window("theta", 100.0, 8.0)
    assert transform_V(w, 0.0, KernelSpec(FormSpec(), Branch.MINUS), 0.3) == 0


def test_V_small_y_order():
    X = 100.0
    w = make_window("theta", X, 8.0)
    spec = KernelSpec(FormSpec(), Branch.PLUS)
    y = np.logspace(-9, -7, 5)
    v = np.abs(transform_V(w, 0.0, spec, y))
    slope = np.polyfit(np.log(y), np.log(v), 1)[0]
    assert slope == pytest.approx(5.5, abs=1e-3)


def test_V_beta_real_and_conjugate():
    w = make_window("theta", 200.0, 8.0)
    spec = KernelSpec(FormSpec(), Branch.PLUS)
    a = transform_V(w, 0.0, spec, 0.05)
    assert abs(a.real) > 0 and abs(a.imag) <= 1e-9 * abs(a)


# --------------------------------------------------------------------------
# Voronoi for r_l


def test_r2_trivial_modulus():
    w = make_window("theta", 1000.0, 8.0)
    assert verify_voronoi_r(2, 1, 1, w).relerr <= 1e-6


@pytest.mark.parametrize("q", [3, 5, 7])
def test_r2_odd_moduli_all_units(q):
    w = make_window("theta", 1000.0, 8.0)
    for check in voronoi_r_all(2, q, w):
        assert check.relerr <= 1e-6


def test_r4_mod_3():
    w = make_window("theta", 1000.0, 8.0)
    assert max(c.relerr for c in voronoi_r_all(4, 3, w)) <= 1e-6


@pytest.mark.parametrize("ell,q", [(2, 4), (3, 4), (2, 8)])
def test_level4_form(ell, q):
    w = make_window("theta", 1000.0, 8.0)
    assert max(c.relerr for c in voronoi_r_all(ell, q, w)) <= 1e-6


def test_level4_form_fails_for_odd_modulus():
    w = make_window("theta", 1000.0, 8.0)
    assert min(c.relerr for c in voronoi_r_all(2, 5, w, variant="level4")) > 0.1


def test_with_beta():
    X = 1000.0
    w = make_window("theta", X, 8.0)
    assert verify_voronoi_r(3, 2, 5, w, beta=0.7 / X).relerr <= 1e-6


def test_modulus_two_mod_four_rejected():
    w = make_window("theta", 1000.0, 8.0)
    with pytest.raises(ValueError):
        verify_voronoi_r(2, 1, 6, w)
    with pytest.raises(ValueError):
        verify_voronoi_r(2, 3, 9, w)
    with pytest.raises(ValueError):
        verify_voronoi_r(2, 1, 8, w, variant="odd")


# --------------------------------------------------------------------------
# Voronoi for lambda_f


@pytest.mark.parametrize("q", [1, 2])
def test_delta_form(tau_medium, q):
    w = make_window("theta", 2000.0, 8.0)
    assert verify_voronoi_f(tau_medium, 1, q, w).relerr <= 1e-5


def test_delta_form_sharper_window(tau_medium):
    a = verify_voronoi_f(tau_medium, 1, 3, make_window("theta", 2000.0, 8.0)).relerr
    b = verify_voronoi_f(tau_medium, 1, 3, make_window("theta", 2000.0, 16.0)).relerr
    assert a <= 1e-5 and b <= 1e-5
    assert b <= 10 * max(a, 1e-12) or b <= 1e-9


def test_short_table_rejected(tau_small):
    with pytest.raises(ValueError):
        verify_voronoi_f(tau_small.truncated(2100), 1, 7, make_window("theta", 2000.0, 8.0))


def test_maass_without_omega_is_partial():
    spec = FormSpec(FormKind.MAASS, weight=0, spectral_mu=1.0)
    rng = np.random.default_rng(0)
    lam = np.concatenate([[0.0, 1.0], rng.normal(size=2000)])
    check = voronoi_f_all(CoefficientTable(spec, lam), 1, make_window("theta", 30.0, 5.0), tail_tol=1e-2)[0]
    assert check.partial


@pytest.mark.parametrize("branch", [Branch.PLUS, Branch.MINUS])
@pytest.mark.parametrize("weight", [0, 1])
def test_maass_V_matches_direct_quadrature(branch, weight):
    import warnings

    from shiftconv.special import AccuracyWarning, kernel_H

    spec = KernelSpec(FormSpec(FormKind.MAASS, weight=weight, spectral_mu=1.0), branch)
    w = make_window("theta", 30.0, 5.0)
    y = np.array([0.05, 0.5, 3.0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        got = transform_V(w, 0.01, spec, y)
        for yy, g in zip(y, got):
            f = lambda x: w(x) * np.exp(-2j * math.pi * 0.01 * x) * kernel_H(spec, 4 * math.pi * np.sqrt(x * yy))
            ref = integrate(f, 15.0, 30.0, rtol=1e-11, breakpoints=np.linspace(15, 30, 41)).value
            assert abs(g - ref) <= 1e-8 * abs(ref)
