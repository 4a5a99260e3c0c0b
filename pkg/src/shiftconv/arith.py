"""Exact integer arithmetic.

Representation counts r_l(n), Jacobi symbols, the theta-multiplier unit
eps_d, modular inverses and the squarefull/squarefree split of a modulus.
Everything here works on Python integers; the only numpy code is the
theta-power convolution, which checks for int64 overflow before each step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

MODULUS_CAP = 2**31

_INT64_MAX = np.iinfo(np.int64).max


class NotInvertibleError(ValueError):
    """Raised when an inverse modulo q is requested for a non-unit."""


@dataclass(frozen=True)
class ReprTable:
    """r_l(n) for n = 0..n_max (r_l(0) = 1)."""

    ell: int
    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    def __getitem__(self, n):
        return self.values[n]

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class ModulusFactorization:
    q: int
    q1: int
    q2: int


def repr_count(ell: int, n_max: int) -> ReprTable:
    """Number of ways to write n as an ordered sum of ``ell`` squares.

    The table is built as the ``ell``-th power of the theta series
    1 + 2 sum_{k>=1} x^{k^2}, one sparse multiplication at a time.
    """
    if ell < 1:
        raise ValueError(f"ell must be >= 1, got {ell}")
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    squares = [k * k for k in range(1, math.isqrt(n_max) + 1)]
    theta = np.zeros(n_max + 1, dtype=np.int64)
    theta[0] = 1
    theta[squares] = 2
    values = theta.copy()
    for _ in range(ell - 1):
        # each output entry is a sum of at most 1 + 2*len(squares) prior entries
        if int(values.max()) > _INT64_MAX // (1 + 2 * len(squares)):
            raise OverflowError(f"r_{ell}(n) overflows int64 for n <= {n_max}")
        nxt = values.copy()
        for s in squares:
            nxt[s:] += 2 * values[: n_max + 1 - s]
        values = nxt
    return ReprTable(ell=ell, values=values)


def r2_divisor_formula(n: int) -> int:
    """Jacobi's two-square formula 4 * sum_{d | n, d odd} chi_4(d)."""
    if n == 0:
        return 1
    total = 0
    for d in range(1, math.isqrt(n) + 1):
        if n % d:
            continue
        for e in {d, n // d}:
            if e % 2:
                total += 1 if e % 4 == 1 else -1
    return 4 * total


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError(f"Jacobi symbol needs odd positive n, got {n}")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def kronecker_chi4(n: int) -> int:
    """The non-trivial character modulo 4."""
    return (0, 1, 0, -1)[n % 4]


def epsilon_unit(d: int) -> complex:
    """eps_d = 1 if d = 1 (mod 4), i if d = -1 (mod 4); d must be odd."""
    if d % 2 == 0:
        raise ValueError(f"eps_d is defined for odd d only, got {d}")
    return 1 + 0j if d % 4 == 1 else 1j


def mod_inverse(a: int, q: int) -> int:
    """The representative d in [1, q] with a*d = 1 (mod q)."""
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if math.gcd(a, q) != 1:
        raise NotInvertibleError(f"{a} is not invertible modulo {q}")
    if q == 1:
        return 1
    return pow(a, -1, q)


def factorint(n: int) -> dict[int, int]:
    """Prime factorization by trial division (n < 2**31)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    if n >= MODULUS_CAP:
        raise ValueError(f"moduli are capped at 2**31, got {n}")
    out: dict[int, int] = {}
    while n % 2 == 0:
        out[2] = out.get(2, 0) + 1
        n //= 2
    p = 3
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    p = 3
    while p * p <= n:
        if n % p == 0:
            return False
        p += 2
    return True


def primes_upto(n: int) -> np.ndarray:
    """Sieve of Eratosthenes."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


def totient(n: int) -> int:
    result = n
    for p in factorint(n):
        result -= result // p
    return result


def divisor_count(n: int) -> int:
    return reduce(lambda acc, e: acc * (e + 1), factorint(n).values(), 1)


def divisor_count_table(n_max: int) -> np.ndarray:
    """d(n) for n = 0..n_max (d(0) set to 0)."""
    d = np.zeros(n_max + 1, dtype=np.int64)
    for k in range(1, n_max + 1):
        d[k::k] += 1
    return d


def is_squarefull(n: int) -> bool:
    return all(e >= 2 for e in factorint(n).values())


def is_squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(n).values())


def factor_squarefull_squarefree(q: int) -> ModulusFactorization:
    """Split q = q1*q2 with 4*q1 squarefull, q2 odd squarefree, (2*q1, q2) = 1.

    Odd primes dividing q exactly once go to q2; everything else
    (all powers of 2 and every odd prime with exponent >= 2) goes to q1.
    """
    if q < 1:
        raise ValueError(f"q must be positive, got {q}")
    q1 = q2 = 1
    for p, e in factorint(q).items():
        if p != 2 and e == 1:
            q2 *= p
        else:
            q1 *= p**e
    return ModulusFactorization(q=q, q1=q1, q2=q2)
