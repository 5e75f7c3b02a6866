"""Scalar and matrix-argument special functions.

The polynomial layer is built on integer partitions: Schur polynomials are
evaluated at eigenvalues through Jacobi-Trudi determinants in complete
homogeneous symmetric polynomials (obtained from power sums by Newton's
identities), and the zonal polynomials used throughout are Schur
polynomials scaled by the standard-Young-tableaux count of their shape.
That scaling is the unique one for which the weight-m class sums to
(tr X)^m, which is the normalization every series here relies on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np
from scipy.special import gammaln, loggamma, logsumexp

from .errors import BadSupport, BadWeights, DomainError, PochhammerPole
from .linalg import HermitianMatrix, eigvals_hermitian

LOG_PI = math.log(math.pi)


# ---------------------------------------------------------------------------
# partitions


@dataclass(frozen=True)
class Partition:
    """Non-increasing tuple of positive parts indexing a symmetric polynomial."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(x) for x in self.parts if x != 0)
        if any(x < 0 for x in parts):
            raise ValueError("parts must be non-negative")
        if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
            raise ValueError(f"parts must be non-increasing, got {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)


def _as_parts(kappa) -> tuple[int, ...]:
    if isinstance(kappa, Partition):
        return kappa.parts
    return Partition(tuple(kappa)).parts


@lru_cache(maxsize=None)
def _partitions_tuple(m: int, max_len: int, max_part: int) -> tuple[tuple[int, ...], ...]:
    if m == 0:
        return ((),)
    if max_len == 0:
        return ()
    out = []
    for first in range(min(m, max_part), 0, -1):
        for rest in _partitions_tuple(m - first, max_len - 1, first):
            out.append((first, *rest))
    return tuple(out)


def partitions_of(m: int, max_len: int) -> list[Partition]:
    """All partitions of weight m with at most max_len parts.

    Ordered lexicographically decreasing: (4), (3,1), (2,2), (2,1,1), ...
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    return [Partition(p) for p in _partitions_tuple(m, max_len, m)]


@lru_cache(maxsize=None)
def syt_count(parts: tuple[int, ...]) -> int:
    """Number of standard Young tableaux of the given shape (hook lengths).

    Exact integer arithmetic; this is the proportionality constant between
    the Schur polynomial and the zonal polynomial of the same shape.
    """
    parts = tuple(x for x in parts if x)
    m = sum(parts)
    if m == 0:
        return 1
    conj = [sum(1 for row in parts if row > j) for j in range(parts[0])]
    hooks = []
    for i, row in enumerate(parts):
        for j in range(row):
            hooks.append(row - j + conj[j] - i - 1)
    return math.factorial(m) // reduce(lambda a, b: a * b, hooks)


# ---------------------------------------------------------------------------
# classical power mean


def power_mean(w: Sequence[float], z: Sequence[float], b: float) -> float:
    """Weighted power mean [sum w_j z_j^b]^(1/b), with the b=0 geometric limit.

    Evaluated in log space so large |b| neither overflows nor underflows.
    """
    w = np.asarray(w, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    if w.shape != z.shape or w.ndim != 1 or w.size == 0:
        raise BadWeights("weights and values must be 1-d sequences of equal length")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        raise BadWeights("all weights must be finite and > 0")
    if abs(float(np.sum(w)) - 1.0) > 1e-12:
        raise BadWeights(f"weights must sum to 1, got {float(np.sum(w))!r}")
    if np.any(z <= 0) or not np.all(np.isfinite(z)):
        raise BadSupport("all values must be finite and > 0")
    logz = np.log(z)
    if b == 0.0:
        return float(np.exp(np.sum(w * logz)))
    return float(np.exp(logsumexp(np.log(w) + b * logz) / b))


# ---------------------------------------------------------------------------
# complex matrix-variate gamma and generalized Pochhammer


def gamma_p_ln(p: int, alpha: complex) -> complex | float:
    """log of the complex matrix-variate gamma function of dimension p.

    Equals (p(p-1)/2) log pi plus the sum of log-gammas at alpha - j + 1
    for j = 1..p. Real input yields a real result.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    re = alpha.real if isinstance(alpha, complex) else float(alpha)
    if not re > p - 1:
        raise DomainError(
            [f"Re(alpha) > p - 1 (got Re(alpha) = {re!r}, p = {p})"],
            context="matrix gamma function undefined",
        )
    head = 0.5 * p * (p - 1) * LOG_PI
    if isinstance(alpha, complex) and alpha.imag != 0.0:
        return head + complex(sum(loggamma(alpha - j) for j in range(p)))
    a = float(re)
    return head + float(sum(gammaln(a - j) for j in range(p)))


def pochhammer_gen(a: complex, kappa) -> complex | float:
    """Generalized Pochhammer symbol: product over rows j of (a - j + 1)
    rising to the j-th part.

    Computed as a direct product, so legitimate zeros come out as exact
    zeros instead of gamma-ratio NaNs.
    """
    parts = _as_parts(kappa)
    out = 1.0 + 0.0j if isinstance(a, complex) else 1.0
    for j, mj in enumerate(parts, start=1):
        base = a - j + 1
        for i in range(mj):
            out *= base + i
    return out


# ---------------------------------------------------------------------------
# Schur and zonal polynomials


def _h_table(lambdas: np.ndarray, degree: int) -> np.ndarray:
    """Complete homogeneous symmetric polynomials h_0..h_degree at lambdas.

    Newton's identities from power sums: k h_k = sum_{i<=k} p_i h_{k-i}.
    """
    h = np.zeros(degree + 1)
    h[0] = 1.0
    if degree == 0:
        return h
    pows = np.array([np.sum(lambdas**r) for r in range(1, degree + 1)])
    for k in range(1, degree + 1):
        h[k] = np.dot(pows[:k][::-1], h[:k]) / k
    return h


def _schur_from_h(parts: tuple[int, ...], h: np.ndarray) -> float:
    ell = len(parts)
    if ell == 0:
        return 1.0
    if ell == 1:
        return float(h[parts[0]])
    jt = np.zeros((ell, ell))
    for i in range(ell):
        for j in range(ell):
            d = parts[i] - (i + 1) + (j + 1)
            if 0 <= d < len(h):
                jt[i, j] = h[d]
    return float(np.linalg.det(jt))


def schur_eval(kappa, lambdas: Sequence[float]) -> float:
    """Schur polynomial s_kappa at the given (real) eigenvalues.

    Returns 0 when kappa has more nonzero parts than variables. Uses the
    Jacobi-Trudi determinant, which stays well conditioned at coincident
    eigenvalues where the bialternant ratio degenerates.
    """
    parts = _as_parts(kappa)
    lam = np.asarray(lambdas, dtype=np.float64)
    if len(parts) > lam.size:
        return 0.0
    if len(parts) == 0:
        return 1.0
    h = _h_table(lam, parts[0] + len(parts) - 1)
    return _schur_from_h(parts, h)


def zonal_from_eigs(kappa, lambdas: Sequence[float]) -> float:
    """Zonal polynomial value from eigenvalues: SYT count times Schur value."""
    parts = _as_parts(kappa)
    return syt_count(parts) * schur_eval(parts, lambdas)


def zonal_c(kappa, x: HermitianMatrix) -> float:
    """Zonal polynomial of a Hermitian matrix argument.

    Normalized so that the weight-m polynomials sum to (tr X)^m; depends on
    X only through its eigenvalues, hence is unitarily invariant.
    """
    return zonal_from_eigs(kappa, eigvals_hermitian(x))


# ---------------------------------------------------------------------------
# confluent hypergeometric function of matrix argument


@dataclass(frozen=True)
class TruncationPolicy:
    """Stopping rule for partition-weight series.

    max_order caps the partition weight; the series stops early once
    consecutive_orders successive order increments each fall below
    rel_stop times the running partial sum.
    """

    max_order: int = 25
    rel_stop: float = 1e-12
    consecutive_orders: int = 3

    def __post_init__(self):
        if self.max_order < 0:
            raise ValueError("max_order must be >= 0")
        if not self.rel_stop > 0:
            raise ValueError("rel_stop must be > 0")
        if self.consecutive_orders < 1:
            raise ValueError("consecutive_orders must be >= 1")


DEFAULT_TRUNCATION = TruncationPolicy()


@dataclass(frozen=True)
class Hyp1F1Result:
    value: float
    order_reached: int
    last_increment: float
    converged: bool


def hyp1f1_matrix(
    a: complex,
    c: complex,
    x: HermitianMatrix | Sequence[float],
    policy: TruncationPolicy = DEFAULT_TRUNCATION,
) -> Hyp1F1Result:
    """Confluent hypergeometric function of Hermitian matrix argument.

    Partial sum over partition weights m <= policy.max_order of
    [a]_M / [c]_M * C_M(X) / m!, with C_M the zonal polynomial. The matrix
    may be passed directly or as a sequence of eigenvalues. A vanishing
    denominator symbol [c]_M raises PochhammerPole; failing to meet the
    early-stop rule is reported via converged=False, not an error.
    """
    if isinstance(x, HermitianMatrix):
        lam = eigvals_hermitian(x)
    else:
        lam = np.asarray(x, dtype=np.float64)
    p = lam.size

    h = _h_table(lam, policy.max_order + p)
    total = 1.0 + 0.0j  # m = 0 term
    inv_mfact = 1.0
    streak = 0
    order_reached = 0
    last_inc = 0.0
    converged = False
    for m in range(1, policy.max_order + 1):
        inv_mfact /= m
        term = 0.0 + 0.0j
        for parts in _partitions_tuple(m, p, m):
            den = pochhammer_gen(complex(c), parts)
            if den == 0:
                raise PochhammerPole(
                    f"denominator symbol vanishes at partition {parts} for c = {c!r}"
                )
            num = pochhammer_gen(complex(a), parts)
            term += (num / den) * (syt_count(parts) * _schur_from_h(parts, h))
        term *= inv_mfact
        total += term
        order_reached = m
        last_inc = abs(term)
        if last_inc < policy.rel_stop * abs(total):
            streak += 1
            if streak >= policy.consecutive_orders:
                converged = True
                break
        else:
            streak = 0

    value = total.real if abs(total.imag) <= 1e-12 * max(1.0, abs(total.real)) else total
    return Hyp1F1Result(
        value=value,
        order_reached=order_reached,
        last_increment=last_inc,
        converged=converged,
    )
