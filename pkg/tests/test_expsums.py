from __future__ import annotations

import cmath
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from shiftconv.arith import epsilon_unit, factor_squarefull_squarefree, primes_upto
from shiftconv.expsums import (
    BoundViolation,
    ExpSumValue,
    gauss_sum,
    gauss_sum_closed_form,
    gauss_table,
    kloosterman,
    kloosterman_table,
    proposition2_bound,
    ramanujan_sum,
    salie,
    salie_table,
    theta_char_sum,
    twisted_sum_C,
    twisted_sum_C_factored,
)


def test_gauss_examples():
    assert gauss_sum(1, 0, 1) == pytest.approx(1)
    assert gauss_sum(1, 0, 3) == pytest.approx(1j * math.sqrt(3))
    assert gauss_sum(1, 0, 5) == pytest.approx(math.sqrt(5))


def test_gauss_closed_form_odd_moduli():
    rng = np.random.default_rng(3)
    for q in range(1, 1000, 2):
        a = np.array([x for x in range(1, q + 1) if math.gcd(x, q) == 1])
        for b in (0, int(rng.integers(0, q)), q - 1):
            direct = gauss_table(b, q, a)
            closed = np.array([gauss_sum_closed_form(int(x), b, q) for x in a])
            assert np.max(np.abs(direct - closed)) <= 1e-9


def test_gauss_table_matches_scalar():
    for q in (7, 12, 25):
        tab = gauss_table(3, q)
        assert np.allclose(tab, [gauss_sum(a, 3, q) for a in range(q)])


def test_gauss_closed_form_rejects_even():
    with pytest.raises(ValueError):
        gauss_sum_closed_form(1, 0, 4)
    with pytest.raises(ValueError):
        gauss_sum_closed_form(3, 0, 9)


def test_kloosterman_examples():
    assert kloosterman(1, 1, 2).value == pytest.approx(1)
    assert kloosterman(1, 1, 3).value == pytest.approx(-1)


def test_kloosterman_degenerates_to_ramanujan():
    for q in range(1, 60):
        for n in range(0, 2 * q):
            assert kloosterman(0, n, q).value == pytest.approx(ramanujan_sum(n, q), abs=1e-9)


def test_kloosterman_is_real_and_symmetric():
    for q in (9, 16, 35):
        K = kloosterman_table(q)
        assert np.allclose(K, K.T)
        assert kloosterman(2, 5, q).value == pytest.approx(K[2, 5])


def test_weil_bound_small_primes():
    for p in primes_upto(499):
        p = int(p)
        K = kloosterman_table(p)
        g = np.gcd(np.gcd.outer(np.arange(p), np.arange(p)), p)
        assert np.all(np.abs(K) <= 2 * np.sqrt(p * g) + 1e-9)


def test_salie_examples():
    v = salie(1, 1, 5)
    assert abs(v) <= 2 * math.sqrt(5)
    for p in (5, 7, 11, 13):
        assert abs(salie(0, 1, p)) == pytest.approx(math.sqrt(p))
        assert abs(salie(p, 3 * p, p)) == pytest.approx(0, abs=1e-9)


def test_salie_bound_and_table():
    for p in primes_upto(199)[1:]:
        p = int(p)
        T = salie_table(p)
        assert T[2 % p, 4 % p] == pytest.approx(salie(2, 4, p).value)
        mn = np.outer(np.arange(p), np.arange(p)) % p != 0
        assert np.all(np.abs(T[mn]) <= 2 * math.sqrt(p) + 1e-9)


def test_salie_rejects_bad_modulus():
    for q in (2, 9, 15):
        with pytest.raises(ValueError):
            salie(1, 1, q)


def test_bound_violation_raised():
    with pytest.raises(BoundViolation):
        ExpSumValue(3.0, 5, 2.0)


def test_twisted_trivial_modulus():
    assert twisted_sum_C(3, 4, 5, 6, 1) == pytest.approx(1)


def test_twisted_reduces_to_kloosterman():
    for p in (3, 5, 7, 11, 13):
        for h in range(p):
            for u in range(p):
                lhs = twisted_sum_C(0, 0, h, u, p)
                rhs = p * epsilon_unit(p) ** 2 * kloosterman(h, u, p).value
                assert lhs == pytest.approx(rhs, abs=1e-9)


def test_twisted_factorization_4_3():
    for b1 in range(6):
        for b2 in range(6):
            for h in range(4):
                for u in range(3):
                    direct = twisted_sum_C(b1, b2, h, u, 12)
                    fact = twisted_sum_C_factored(b1, b2, h, u, 4, 3)
                    assert direct == pytest.approx(fact, abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 40), st.integers(1, 40), st.integers(-50, 50), st.integers(-50, 50),
       st.integers(-50, 50), st.integers(-50, 50))
def test_twisted_factorization_property(q1, q2, b1, b2, h, u):
    if math.gcd(q1, q2) != 1:
        return
    direct = twisted_sum_C(b1, b2, h, u, q1 * q2)
    fact = twisted_sum_C_factored(b1, b2, h, u, q1, q2)
    assert abs(direct - fact) <= 1e-8 * max(1.0, abs(direct))


def test_bare_constant_fails_at_a_prime():
    # |C| = 13 |Salie-type sum| can approach 2 * 13^(3/2): the bare constant 1 is too small
    value = abs(twisted_sum_C(12, 0, 12, 12, 13))
    assert value > 1.7 * proposition2_bound(12, 13)
    assert value <= proposition2_bound(12, 13, per_prime_constant=True)


def test_bound_with_per_prime_constant():
    rng = random.Random(11)
    worst = 0.0
    for _ in range(150):
        q = rng.randint(1, 2000)
        b1, b2, h, u = (rng.randint(0, q) for _ in range(4))
        v = abs(twisted_sum_C(b1, b2, h, u, q))
        worst = max(worst, v / proposition2_bound(h, q, per_prime_constant=True))
    assert worst <= 1 + 1e-9


def test_proposition2_bound_uses_factorization():
    f = factor_squarefull_squarefree(360)
    assert proposition2_bound(5, 360) == pytest.approx(f.q1**2 * f.q2**1.5 * math.sqrt(5))


@pytest.mark.parametrize("ell", [1, 2, 3, 4, 5])
def test_theta_char_sum_direct_equals_factored(ell):
    for p in (3, 5, 7, 11, 13):
        for h in (1, 3, 5):
            if math.gcd(p, 2 * h) != 1:
                continue
            for M in (0, 1, 2, 7):
                s = theta_char_sum(h, M, 4 * p, ell)
                assert s.value == pytest.approx(s.factored, abs=1e-9)
                assert s.within_bound
                assert abs(s.prime_part) <= 2 * math.sqrt(p) + 1e-9


def test_theta_char_sum_example():
    s = theta_char_sum(1, 1, 28, 2)
    assert s.value == pytest.approx(s.factored, abs=1e-12)
    assert s.prime_part == pytest.approx(kloosterman(1, pow(4, -2, 7), 7).value)


def test_theta_char_sum_with_level():
    D = 3
    chi = [0, 1, -1]  # the character mod 3
    for ell in (2, 3):
        for p in (5, 7, 11):
            s = theta_char_sum(1, 2, 4 * D * p, ell, D=D, chi=chi)
            assert s.value == pytest.approx(s.factored, abs=1e-9)


def test_theta_char_sum_rejects_shape():
    with pytest.raises(ValueError):
        theta_char_sum(1, 1, 30, 2)  # not a multiple of 4
    with pytest.raises(ValueError):
        theta_char_sum(1, 1, 36, 2)  # 36 = 4 * 9, 9 not prime
    with pytest.raises(ValueError):
        theta_char_sum(7, 1, 28, 2)  # p = 7 divides h
    with pytest.raises(ValueError):
        theta_char_sum(1, 1, 4 * 3 * 5, 2, D=3)  # chi missing
