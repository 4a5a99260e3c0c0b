"""Complete exponential sums.

Throughout, e(x) = exp(2 pi i x).  Phases with rational arguments k/q are
reduced exactly (integer arithmetic mod q) and looked up in a table of
q-th roots of unity, so no large angles ever reach a trigonometric call.

Direct summation is the ground truth for every sum here; closed forms and
CRT factorizations are checked against it, not the other way round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import (
    divisor_count,
    epsilon_unit,
    is_prime,
    jacobi_symbol,
    kronecker_chi4,
    mod_inverse,
)

_BOUND_SLACK = 1e-9


class BoundViolation(ArithmeticError):
    """An exponential sum exceeded the bound it is known to satisfy."""


def e(x):
    """exp(2 pi i x) with x reduced mod 1 first."""
    x = np.asarray(x, dtype=float)
    return np.exp(2j * np.pi * np.mod(x, 1.0))


def roots_of_unity(q: int) -> np.ndarray:
    """e(k/q) for k = 0..q-1."""
    return np.exp(2j * np.pi * np.arange(q) / q)


@dataclass(frozen=True)
class ExpSumValue:
    value: complex
    modulus: int
    bound: float = math.inf

    def __post_init__(self):
        if abs(self.value) > self.bound * (1 + _BOUND_SLACK) + _BOUND_SLACK:
            raise BoundViolation(
                f"|{self.value}| = {abs(self.value):.6g} exceeds bound {self.bound:.6g} (q = {self.modulus})"
            )

    def __complex__(self):
        return complex(self.value)

    def __abs__(self):
        return abs(self.value)


def _units(q: int) -> np.ndarray:
    a = np.arange(q, dtype=np.int64)
    return a[np.gcd(a, q) == 1]


def _inverses(units: np.ndarray, q: int) -> np.ndarray:
    if q == 1:
        return np.zeros_like(units)
    return np.array([pow(int(a), -1, q) for a in units], dtype=np.int64)


# --------------------------------------------------------------------------
# Gauss sums

def gauss_sum(a: int, b: int, q: int) -> complex:
    """G(a, b; q) = sum_{x mod q} e((a x^2 + b x)/q), by direct summation."""
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    x = np.arange(q, dtype=np.int64)
    k = ((a % q) * (x * x % q) + (b % q) * x) % q
    return complex(roots_of_unity(q)[k].sum())


def gauss_sum_closed_form(a: int, b: int, q: int) -> complex:
    """e(-4bar abar b^2 / q) (a/q) eps_q sqrt(q), valid when (2a, q) = 1."""
    if q < 1 or math.gcd(2 * a, q) != 1:
        raise ValueError(f"closed form needs gcd(2a, q) = 1, got a={a}, q={q}")
    if q == 1:
        return 1 + 0j
    four_bar = mod_inverse(4, q)
    a_bar = mod_inverse(a, q)
    phase = (-four_bar * a_bar * b * b) % q
    return complex(
        np.exp(2j * np.pi * phase / q) * jacobi_symbol(a, q) * epsilon_unit(q) * math.sqrt(q)
    )


def gauss_table(b: int, q: int, a_values=None) -> np.ndarray:
    """G(a, b; q) for every a in ``a_values`` (default: all residues mod q).

    Direct O(q) summation per a, done as one vectorized gather from the
    table of q-th roots of unity.
    """
    roots = roots_of_unity(q)
    a = np.arange(q, dtype=np.int64) if a_values is None else np.asarray(a_values, dtype=np.int64) % q
    x = np.arange(q, dtype=np.int64)
    sq = x * x % q
    lin = (b % q) * x % q
    out = np.empty(len(a), dtype=complex)
    chunk = max(1, 2_000_000 // q)
    for start in range(0, len(a), chunk):
        blk = a[start : start + chunk]
        k = (blk[:, None] * sq[None, :] + lin[None, :]) % q
        out[start : start + chunk] = roots[k].sum(axis=1)
    return out


# --------------------------------------------------------------------------
# Kloosterman and Salie sums

def kloosterman(m: int, n: int, q: int) -> ExpSumValue:
    """S(m, n; q) = sum*_{a mod q} e((m a + n abar)/q).

    The attached bound is the Weil-Estermann bound d(q) sqrt(q) sqrt((m, n, q)).
    """
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    a = _units(q)
    k = ((m % q) * a + (n % q) * _inverses(a, q)) % q
    value = roots_of_unity(q)[k].sum().real
    g = math.gcd(math.gcd(m, n), q)
    return ExpSumValue(float(value), q, divisor_count(q) * math.sqrt(q) * math.sqrt(g))


def kloosterman_table(q: int) -> np.ndarray:
    """S(m, n; q) for all 0 <= m, n < q as one q x q real matrix.

    S = E F^T with E[m, a] = e(m a / q) and F[n, a] = e(n abar / q) over
    units a; O(q^2 phi(q)) flops in a single matrix product.
    """
    a = _units(q)
    roots = roots_of_unity(q)
    k = np.arange(q, dtype=np.int64)[:, None]
    E = roots[(k * a[None, :]) % q]
    F = roots[(k * _inverses(a, q)[None, :]) % q]
    return (E @ F.T).real


def salie_table(p: int) -> np.ndarray:
    """T(m, n; p) for all 0 <= m, n < p (p an odd prime)."""
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"Salie sums need an odd prime modulus, got {p}")
    a = _units(p)
    chars = np.array([jacobi_symbol(int(x), p) for x in a], dtype=float)
    roots = roots_of_unity(p)
    k = np.arange(p, dtype=np.int64)[:, None]
    E = roots[(k * a[None, :]) % p] * chars[None, :]
    F = roots[(k * _inverses(a, p)[None, :]) % p]
    return E @ F.T


def ramanujan_sum(n: int, q: int) -> int:
    """c_q(n) via the Moebius/totient formula (independent of kloosterman)."""
    from .arith import factorint, totient

    g = math.gcd(n, q)
    m = q // g
    mu = 0 if any(e > 1 for e in factorint(m).values()) else (-1) ** len(factorint(m))
    return mu * totient(q) // totient(m)


def salie(m: int, n: int, p: int) -> ExpSumValue:
    """T(m, n; p) = sum*_{a mod p} (a/p) e((m a + n abar)/p) for an odd prime p.

    Bound: 2 sqrt(p) if p does not divide mn; otherwise the sum collapses to
    a quadratic Gauss sum (or to 0) and the bound is sqrt(p).
    """
    if p % 2 == 0 or not is_prime(p):
        raise ValueError(f"Salie sums need an odd prime modulus, got {p}")
    a = _units(p)
    chars = np.array([jacobi_symbol(int(x), p) for x in a], dtype=float)
    k = ((m % p) * a + (n % p) * _inverses(a, p)) % p
    value = complex((chars * roots_of_unity(p)[k]).sum())
    bound = 2 * math.sqrt(p) if (m * n) % p else math.sqrt(p)
    return ExpSumValue(value, p, bound)


# --------------------------------------------------------------------------
# the twisted double-Gauss sum

def twisted_sum_C(b1: int, b2: int, h: int, u: int, q: int) -> complex:
    """C(b1, b2, h, u; q) = sum*_{a mod q} G(a,b1;q) G(a,b2;q) e((a h + abar u)/q)."""
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    a = _units(q)
    g1 = gauss_table(b1, q, a)
    g2 = g1 if (b1 - b2) % q == 0 else gauss_table(b2, q, a)
    k = ((h % q) * a + (u % q) * _inverses(a, q)) % q
    return complex((g1 * g2 * roots_of_unity(q)[k]).sum())


def twisted_sum_C_factored(b1: int, b2: int, h: int, u: int, q1: int, q2: int) -> complex:
    """C(b1,b2,q2bar^2 h,u;q1) * C(b1,b2,q1bar^2 h,u;q2) for coprime q1, q2."""
    if math.gcd(q1, q2) != 1:
        raise ValueError("factorization needs coprime moduli")
    h1 = mod_inverse(q2, q1) ** 2 * h if q1 > 1 else 0
    h2 = mod_inverse(q1, q2) ** 2 * h if q2 > 1 else 0
    return twisted_sum_C(b1, b2, h1, u, q1) * twisted_sum_C(b1, b2, h2, u, q2)


def proposition2_bound(h: int, q: int, per_prime_constant: bool = False) -> float:
    """q1^2 q2^(3/2) (h, q2)^(1/2) for the squarefull/squarefree split of q.

    With ``per_prime_constant`` the bound carries the extra factor
    2^omega(q2).  That factor is needed: for a prime q = p not dividing h
    the sum reduces to p times a Kloosterman or Salie sum, and those reach
    close to 2 sqrt(p), so the bare constant 1 is exceeded.
    """
    from .arith import factor_squarefull_squarefree, factorint

    f = factor_squarefull_squarefree(q)
    bound = f.q1**2 * f.q2**1.5 * math.sqrt(math.gcd(h, f.q2))
    if per_prime_constant:
        bound *= 2 ** len(factorint(f.q2))
    return bound


# --------------------------------------------------------------------------
# the character sum from the r_l Voronoi twist over moduli q = 4 D p

@dataclass(frozen=True)
class ThetaCharSum:
    value: complex  # direct O(q) summation
    factored: complex  # (4D-part) * (p-part) after CRT
    level_part: complex
    prime_part: complex
    p: int
    bound: float  # phi(4D) * 2 sqrt(p)

    @property
    def within_bound(self) -> bool:
        return abs(self.value) <= self.bound * (1 + _BOUND_SLACK)


def _theta_multiplier(q: int, d: int, ell: int) -> complex:
    """((q/d) eps_d^{-1})^ell for odd d."""
    return (jacobi_symbol(q, d) / epsilon_unit(d)) ** ell


def _character_value(chi, D: int, n: int) -> complex:
    if D == 1:
        return 1.0
    return chi[n % D]


def theta_char_sum(h: int, M: int, q: int, ell: int, D: int = 1, chi=None) -> ThetaCharSum:
    """sum_{a mod q, ad = 1} chi_D(-d) ((q/d) eps_d^{-1})^ell e((h a + M d)/q).

    ``q`` must have the shape 4*D*p with p prime and p not dividing 2*D*h.
    For D > 1 the nebentypus must be passed as a sequence ``chi`` of its
    values on residues 0..D-1.

    The sum is evaluated twice: directly over a mod q, and as the product of
    a sum mod 4D and a Kloosterman (l even) or Salie (l odd) sum mod p,
    obtained from the CRT split a = a1 p (mod 4D), a = a2 4D (mod p).
    """
    if D > 1 and chi is None:
        raise ValueError("a nebentypus table chi (values mod D) is required for D > 1")
    if q % (4 * D):
        raise ValueError(f"q = {q} is not a multiple of 4D = {4 * D}")
    p = q // (4 * D)
    if not is_prime(p) or math.gcd(p, 2 * D * h) != 1:
        raise ValueError(f"q = {q} is not 4*D*p with p prime and (p, 2Dh) = 1")
    # direct evaluation
    roots = roots_of_unity(q)
    direct = 0j
    for a in range(1, q):
        if math.gcd(a, q) != 1:
            continue
        d = pow(a, -1, q)
        direct += (
            _character_value(chi, D, -d)
            * _theta_multiplier(q, d, ell)
            * roots[(h * a + M * d) % q]
        )
    # CRT-factored evaluation
    q1 = 4 * D
    p_bar = mod_inverse(p, q1)
    r1 = roots_of_unity(q1)
    level_part = 0j
    for a1 in range(1, q1):
        if math.gcd(a1, q1) != 1:
            continue
        a1_bar = pow(a1, -1, q1)
        d1 = a1_bar * p_bar % q1  # d mod 4D
        if ell % 2 == 0:
            mult = kronecker_chi4(d1) ** (ell // 2)
        else:
            # (q/d) = (D/d)(p/d) and (p/d) = (d/p)(-1)^((p-1)(d-1)/4); (d/p) goes to the p-part
            sign = -1 if (p % 4 == 3 and d1 % 4 == 3) else 1
            mult = jacobi_symbol(D, d1) * sign / epsilon_unit(d1) ** ell
        level_part += (
            _character_value(chi, D, -d1) * mult * r1[(h * a1 + p_bar * p_bar * M * a1_bar) % q1]
        )
    m2 = mod_inverse(q1, p) ** 2 * M
    if ell % 2 == 0:
        prime_part = complex(kloosterman(h, m2, p).value)
    else:
        # (d/p) = (abar/p) = (a/p) = (4D a2 / p)
        prime_part = jacobi_symbol(q1, p) * salie(h, m2, p).value
    bound = (q1 // 2) * 2 * math.sqrt(p)  # phi(4D) <= 2D, and |p-part| <= 2 sqrt(p)
    return ThetaCharSum(
        value=direct,
        factored=level_part * prime_part,
        level_part=level_part,
        prime_part=prime_part,
        p=p,
        bound=bound,
    )
