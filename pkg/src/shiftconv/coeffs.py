"""Normalized Hecke eigenvalues lambda_f(n).

Native path: the discriminant form Delta = q prod (1 - q^m)^24 (level 1,
weight 12), expanded exactly and normalized by n^(11/2).  Anything else
(general level, Maass forms) comes in through a plain-text table.

Coefficient file format::

    # kind: maass
    # weight: 0
    # level: 1
    # mu: 9.533695261353557
    # theta: 0.109375
    1 1.0
    2 1.549304477941
    ...

Lines starting with ``#`` are comments; those of the form ``# key: value``
(or ``# key = value``) with a recognised key are metadata.  Records are
``n value`` with n = 1, 2, 3, ... without gaps.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .arith import divisor_count_table, is_prime, primes_upto

THETA_DEFAULT = 7 / 64


class FormKind(enum.Enum):
    HOLOMORPHIC = "holomorphic"
    MAASS = "maass"


@dataclass(frozen=True)
class FormSpec:
    kind: FormKind = FormKind.HOLOMORPHIC
    weight: int = 12
    level: int = 1
    spectral_mu: float = 0.0
    theta: float = THETA_DEFAULT
    # Voronoi constant for the minus branch; only meaningful for Maass input.
    omega: complex | None = None

    def __post_init__(self):
        if self.kind is FormKind.HOLOMORPHIC and self.spectral_mu != 0:
            raise ValueError("holomorphic forms have spectral_mu = 0")
        if not 0 <= self.theta <= 0.5:
            raise ValueError(f"theta must lie in [0, 1/2], got {self.theta}")
        if self.level < 1 or self.weight < 0:
            raise ValueError("level must be >= 1 and weight >= 0")


@dataclass(frozen=True)
class Violation:
    kind: str  # "hecke", "multiplicative", "normalization" or "bound"
    indices: tuple[int, ...]
    residual: float


@dataclass(frozen=True)
class HeckeReport:
    violations: tuple[Violation, ...]
    n_checked: int

    @property
    def ok(self) -> bool:
        return not self.violations

    def touching(self, n: int) -> list[Violation]:
        return [v for v in self.violations if n in v.indices]


@dataclass(frozen=True)
class CoefficientTable:
    """lambda_f(n) for n = 1..n_max, stored with a dummy slot at index 0.

    ``table.lam[n]`` is lambda_f(n); ``table.lam[0]`` is 0 so that index
    arithmetic such as ``lam[n + h]`` needs no offsets.
    """

    spec: FormSpec
    lam: np.ndarray
    report: HeckeReport | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.lam.ndim != 1 or len(self.lam) < 2:
            raise ValueError("coefficient table needs at least lambda(1)")
        self.lam.setflags(write=False)

    @property
    def n_max(self) -> int:
        return len(self.lam) - 1

    def __getitem__(self, n):
        return self.lam[n]

    def __len__(self):
        return self.n_max

    def truncated(self, n_max: int) -> CoefficientTable:
        if n_max > self.n_max:
            raise ValueError(f"table only reaches n = {self.n_max}")
        return CoefficientTable(self.spec, self.lam[: n_max + 1].copy())


class CoefficientFileError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class CoefficientGapError(CoefficientFileError):
    pass


# --------------------------------------------------------------------------
# Ramanujan tau by multi-modular expansion of the eta product

def _crt_primes(n_max: int) -> list[int]:
    # need prod(p) > 2 * max|tau(n)|; |tau(n)| <= d(n) n^(11/2) <= 2 sqrt(n) n^(11/2)
    bound = 4 * max(n_max, 2) ** 6
    primes, prod, cand = [], 1, 2**31 - 1
    while prod <= bound:
        if is_prime(cand):
            primes.append(cand)
            prod *= cand
        cand -= 2
    return primes


def _eta24_mod(n_terms: int, p: int) -> np.ndarray:
    """Coefficients of prod_{m>=1} (1 - x^m)^24 mod p, up to x^(n_terms - 1).

    Uses Jacobi's identity prod (1 - x^m)^3 = sum_k (-1)^k (2k+1) x^(k(k+1)/2)
    and raises that sparse series to the 8th power.
    """
    tri, coef = [], []
    k = 0
    while k * (k + 1) // 2 < n_terms:
        tri.append(k * (k + 1) // 2)
        coef.append((-1) ** k * (2 * k + 1))
        k += 1
    cube = np.zeros(n_terms, dtype=np.int64)
    cube[tri] = np.array(coef, dtype=np.int64) % p
    cur = cube.copy()
    for _ in range(7):
        nxt = np.zeros(n_terms, dtype=np.int64)
        for i, (t, c) in enumerate(zip(tri, coef)):
            nxt[t:] += c * cur[: n_terms - t]
            if i % 256 == 255:
                nxt %= p
        cur = nxt % p
    return cur


def ramanujan_tau_exact(n_max: int) -> list[int]:
    """tau(1), ..., tau(n_max) as exact Python integers."""
    if not 1 <= n_max <= 10**7:
        raise ValueError(f"n_max must lie in [1, 10^7], got {n_max}")
    primes = _crt_primes(n_max)
    residues = [_eta24_mod(n_max, p) for p in primes]
    # Garner mixed-radix digits, all in int64 (products of 31-bit numbers)
    digits = [residues[0]]
    for i in range(1, len(primes)):
        p = primes[i]
        t = residues[i].copy()
        for j in range(i):
            inv = pow(primes[j], -1, p)
            t = ((t - digits[j]) % p) * inv % p
        digits.append(t)
    modulus = math.prod(primes)
    values = digits[-1].astype(object)
    for i in range(len(primes) - 2, -1, -1):
        values = values * primes[i] + digits[i].astype(object)
    half = modulus // 2
    return [int(v) - modulus if v > half else int(v) for v in values]


def ramanujan_tau(n_max: int) -> CoefficientTable:
    """Normalized eigenvalues tau(n) / n^(11/2) of the discriminant form."""
    tau = ramanujan_tau_exact(n_max)
    n = np.arange(1, n_max + 1, dtype=float)
    lam = np.zeros(n_max + 1)
    lam[1:] = np.array(tau, dtype=float) / n**5.5
    spec = FormSpec(FormKind.HOLOMORPHIC, weight=12, level=1)
    return CoefficientTable(spec, lam)


# --------------------------------------------------------------------------
# validation

def check_hecke_relations(
    table: CoefficientTable, tol: float = 1e-9, character=None
) -> HeckeReport:
    """Collect violations of the Hecke relations.

    Checks lambda(1) = 1, coprime multiplicativity lambda(mn) = lambda(m)
    lambda(n) for all 2 <= m < n with mn <= N, and the prime-power
    recursion lambda(p) lambda(p^k) = lambda(p^(k+1)) + chi(p) lambda(p^(k-1))
    for primes p not dividing the level.  ``character`` maps p to chi(p);
    it defaults to the trivial character.
    """
    lam = np.asarray(table.lam)
    N = table.n_max
    level = table.spec.level
    found: list[Violation] = []

    if abs(lam[1] - 1) > tol:
        found.append(Violation("normalization", (1,), float(lam[1] - 1)))

    for m in range(2, math.isqrt(N) + 1):
        ns = np.arange(m + 1, N // m + 1)
        ns = ns[np.gcd(ns, m) == 1]
        resid = lam[m * ns] - lam[m] * lam[ns]
        for n, r in zip(ns[np.abs(resid) > tol], resid[np.abs(resid) > tol]):
            found.append(Violation("multiplicative", (m, int(n), m * int(n)), float(r)))

    for p in primes_upto(N // 2):
        p = int(p)
        if level % p == 0:
            continue
        chi = 1 if character is None else character(p)
        k = 1
        while p ** (k + 1) <= N:
            lhs = lam[p] * lam[p**k]
            rhs = lam[p ** (k + 1)] + chi * lam[p ** (k - 1)]
            if abs(lhs - rhs) > tol:
                idx = (p, p**k, p ** (k + 1), p ** (k - 1))
                found.append(Violation("hecke", idx, float(lhs - rhs)))
            k += 1
    return HeckeReport(tuple(found), N)


def check_ramanujan_bound(
    table: CoefficientTable, theta: float | None = None, tol: float = 1e-9
) -> list[int]:
    """Indices n with |lambda(n)| > d(n) n^theta (theta from the form spec)."""
    theta = table.spec.theta if theta is None else theta
    N = table.n_max
    n = np.arange(1, N + 1, dtype=float)
    bound = divisor_count_table(N)[1:] * n**theta
    bad = np.flatnonzero(np.abs(table.lam[1:]) > bound + tol) + 1
    return [int(k) for k in bad]


def validate(table: CoefficientTable, tol: float = 1e-9) -> HeckeReport:
    """Hecke relations plus the d(n) n^theta size bound in one report."""
    hecke = check_hecke_relations(table, tol)
    bound = tuple(
        Violation("bound", (n,), float(abs(table.lam[n]))) for n in check_ramanujan_bound(table, tol=tol)
    )
    return HeckeReport(hecke.violations + bound, table.n_max)


# --------------------------------------------------------------------------
# file I/O

_META_KEYS = {"kind", "weight", "level", "mu", "theta", "omega"}


def _spec_from_metadata(meta: dict[str, str]) -> FormSpec:
    kind = FormKind(meta.get("kind", "holomorphic").strip().lower())
    return FormSpec(
        kind=kind,
        weight=int(meta.get("weight", 12 if kind is FormKind.HOLOMORPHIC else 0)),
        level=int(meta.get("level", 1)),
        spectral_mu=float(meta.get("mu", 0.0)),
        theta=float(meta.get("theta", THETA_DEFAULT)),
        omega=complex(meta["omega"].replace(" ", "")) if "omega" in meta else None,
    )


def load_coefficients(path, spec: FormSpec | None = None, validate_table: bool = True) -> CoefficientTable:
    """Read a coefficient file.

    ``spec`` overrides the file metadata when given.  A validation report
    (Hecke relations, size bound) is attached to the returned table but
    never raises.
    """
    meta: dict[str, str] = {}
    values: list[float] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                for sep in (":", "="):
                    key, found, val = body.partition(sep)
                    if found and key.strip().lower() in _META_KEYS:
                        meta[key.strip().lower()] = val.strip()
                        break
                continue
            parts = line.split()
            if len(parts) != 2:
                raise CoefficientFileError(f"expected 'n value', got {line!r}", lineno)
            try:
                n, val = int(parts[0]), float(parts[1])
            except ValueError:
                raise CoefficientFileError(f"cannot parse {line!r}", lineno) from None
            expected = len(values) + 1
            if n != expected:
                raise CoefficientGapError(f"expected n = {expected}, found n = {n}", lineno)
            values.append(val)
    if not values:
        raise CoefficientFileError(f"no coefficient records in {path}")
    if spec is None:
        spec = _spec_from_metadata(meta)
    table = CoefficientTable(spec, np.concatenate([[0.0], values]))
    if validate_table:
        table = CoefficientTable(spec, table.lam.copy(), report=validate(table))
    return table


def save_coefficients(table: CoefficientTable, path) -> None:
    spec = table.spec
    lines = [
        f"# kind: {spec.kind.value}",
        f"# weight: {spec.weight}",
        f"# level: {spec.level}",
        f"# mu: {spec.spectral_mu!r}",
        f"# theta: {spec.theta!r}",
    ]
    if spec.omega is not None:
        lines.append(f"# omega: {complex(spec.omega)!r}")
    lines += [f"{n} {float(table.lam[n])!r}" for n in range(1, table.n_max + 1)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
