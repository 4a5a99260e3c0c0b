from __future__ import annotations

import math

import numpy as np
import pytest

from shiftconv.coeffs import (
    CoefficientFileError,
    CoefficientGapError,
    CoefficientTable,
    FormKind,
    FormSpec,
    check_hecke_relations,
    check_ramanujan_bound,
    load_coefficients,
    ramanujan_tau,
    ramanujan_tau_exact,
    save_coefficients,
)


def tau_by_product(n_max):
    """q prod (1 - q^m)^24 by repeated multiplication with Python integers."""
    poly = [1] + [0] * (n_max - 1)
    for m in range(1, n_max):
        for _ in range(24):
            for k in range(n_max - 1, m - 1, -1):
                poly[k] -= poly[k - m]
    return poly  # coefficient of q^(k+1)


def test_tau_small_values():
    tau = ramanujan_tau_exact(10)
    assert tau == [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_tau_against_naive_product():
    assert ramanujan_tau_exact(120) == tau_by_product(120)


def test_tau_large_values_and_congruence():
    tau = ramanujan_tau_exact(1000)
    assert tau[99] == 37_534_859_200
    # tau(1000) = tau(8) tau(125), tau(125) = tau(5)^3 - 2 * 5^11 tau(5)
    assert tau[999] == 84480 * (4830**3 - 2 * 5**11 * 4830)
    # Ramanujan's congruence tau(n) = sigma_11(n) mod 691
    for n in range(1, 1001):
        sigma11 = sum(d**11 for d in range(1, n + 1) if n % d == 0)
        assert (tau[n - 1] - sigma11) % 691 == 0


def test_normalization_examples():
    t = ramanujan_tau(3)
    assert t[1] == 1.0
    assert t[2] == pytest.approx(-0.5303300859, abs=1e-10)
    assert t[3] * 3**5.5 == pytest.approx(252)


def test_range_checks():
    with pytest.raises(ValueError):
        ramanujan_tau(0)
    with pytest.raises(ValueError):
        ramanujan_tau(10**7 + 1)


def test_native_table_is_hecke(tau_small):
    t = tau_small.truncated(1000)
    assert check_hecke_relations(t).ok
    assert check_ramanujan_bound(t, theta=0) == []


def test_corrupted_entry_is_localized(tau_small):
    lam = tau_small.truncated(1000).lam.copy()
    lam[4] += 1
    report = check_hecke_relations(CoefficientTable(tau_small.spec, lam))
    assert report.violations
    assert all(4 in v.indices for v in report.violations)
    # every relation that involves lambda(4) is flagged
    assert any(v.kind == "hecke" and v.indices[:2] == (2, 2) for v in report.violations)
    assert any(v.kind == "multiplicative" and v.indices[:2] == (3, 4) for v in report.violations)


def test_single_entry_table():
    t = CoefficientTable(FormSpec(), np.array([0.0, 1.0]))
    assert check_hecke_relations(t).ok


def test_form_spec_invariants():
    assert FormSpec().theta == 7 / 64
    with pytest.raises(ValueError):
        FormSpec(FormKind.HOLOMORPHIC, spectral_mu=1.0)
    with pytest.raises(ValueError):
        FormSpec(theta=0.6)


def test_file_roundtrip(tmp_path, tau_small):
    path = tmp_path / "tau.txt"
    t = tau_small.truncated(500)
    save_coefficients(t, path)
    back = load_coefficients(path)
    assert np.array_equal(back.lam, t.lam)
    assert back.spec == t.spec
    assert back.report is not None and back.report.ok


def test_file_parse(tmp_path):
    path = tmp_path / "c.txt"
    path.write_text("# kind: maass\n# weight: 0\n# mu: 4.5\n1 1.0\n2 -0.53033\n")
    t = load_coefficients(path)
    assert t.n_max == 2
    assert t.spec.kind is FormKind.MAASS and t.spec.spectral_mu == 4.5


def test_file_gap_and_parse_errors(tmp_path):
    gap = tmp_path / "gap.txt"
    gap.write_text("1 1.0\n3 0.5\n")
    with pytest.raises(CoefficientGapError) as info:
        load_coefficients(gap)
    assert info.value.line == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("1 1.0\n2 abc\n")
    with pytest.raises(CoefficientFileError) as info:
        load_coefficients(bad)
    assert info.value.line == 2


def test_rankin_selberg(tau_medium):
    lam2 = np.cumsum(tau_medium.lam[1:] ** 2)
    C = [lam2[x - 1] / x for x in (100, 1000, 10_000)]
    assert max(C) / min(C) <= 2


def test_partial_sum_cancellation(tau_medium):
    x = 10_000
    lam = tau_medium.lam[1 : x + 1]
    n = np.arange(1, x + 1)
    alphas = np.random.default_rng(7).random(100)
    sums = np.abs(np.exp(2j * np.pi * np.outer(alphas, n)) @ lam)
    assert np.all(sums <= 20 * math.sqrt(x) * math.log(2 * x))
