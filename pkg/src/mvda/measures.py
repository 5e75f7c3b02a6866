"""Samplers for the complex matrix-variate gamma and Dirichlet measures.

The matrix gamma draw builds a lower-triangular factor T with chi-type
diagonal entries (squared diagonals are gamma variates with shapes
alpha - j + 1) and complex Gaussian strict-lower entries, then returns
T T*. Type-1 and type-2 Dirichlet samples are gamma ratios: with
independent W_1..W_{k+1},

    type-1:  X_j = S^{-1/2} W_j S^{-1/2},  S = W_1 + ... + W_{k+1}
    type-2:  X_j = W_{k+1}^{-1/2} W_j W_{k+1}^{-1/2}

The rectangular measures are handled through the induced scalar variables
u_j (the values of the Hermitian forms), which follow ordinary Dirichlet
laws with the shifted parameters alpha_j + n_j. Sampler correctness is not
assumed: the Monte Carlo harness cross-checks every construction against
the closed-form averages.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, SamplerError
from .linalg import HermitianMatrix
from .rng import CounterRng, SeedSpec

logger = logging.getLogger(__name__)

KINDS = ("type1", "type2", "rect_type1_p1", "rect_type2_p1")

# Relative eigenvalue floor applied before inverting near-singular gamma sums.
EIG_FLOOR_RTOL = 1e-13

_floor_events = 0


def floor_event_count() -> int:
    """Number of eigenvalues floored during inverse square roots so far."""
    return _floor_events


@dataclass(frozen=True)
class MeasureSpec:
    """Full parameterization of a Dirichlet measure.

    kind type1/type2 are the Hermitian p x p measures; the rect_* kinds are
    the p = 1 rectangular (Hermitian form) measures described through the
    induced scalar variables u_j, with per-form sizes ns and optional
    positive definite form matrices Bs (identity when omitted; the u_j law
    does not depend on them, only the normalizing constant does).
    """

    kind: str
    p: int
    k: int
    alphas: tuple[float, ...]
    ns: Optional[tuple[int, ...]] = None
    Bs: Optional[tuple[HermitianMatrix, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "alphas", tuple(float(a) for a in self.alphas))
        if self.ns is not None:
            object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))
        if self.Bs is not None:
            object.__setattr__(self, "Bs", tuple(self.Bs))

    @property
    def rectangular(self) -> bool:
        return self.kind.startswith("rect_")

    def validate(self) -> None:
        """Raise DomainError naming every violated existence condition."""
        bad: list[str] = []
        if self.kind not in KINDS:
            raise ValueError(f"unknown measure kind {self.kind!r}")
        if self.p < 1 or self.k < 1:
            raise ValueError("p and k must be >= 1")
        if len(self.alphas) != self.k + 1:
            raise ValueError(
                f"need k + 1 = {self.k + 1} alpha parameters, got {len(self.alphas)}"
            )
        if not self.rectangular:
            if self.ns is not None or self.Bs is not None:
                raise ValueError("ns/Bs only apply to rectangular measures")
            for j, a in enumerate(self.alphas, start=1):
                if not a > self.p - 1:
                    bad.append(f"alpha_{j} > p - 1 (got {a!r}, p = {self.p})")
        else:
            if self.p != 1:
                bad.append(f"p == 1 for rectangular measures (got p = {self.p})")
            if self.ns is None or len(self.ns) != self.k:
                raise ValueError("rectangular measures need k form sizes ns")
            if any(n < 1 for n in self.ns):
                raise ValueError("form sizes must be >= 1")
            if self.Bs is not None:
                if len(self.Bs) != self.k:
                    raise ValueError("need one form matrix per component")
                for j, (b, n) in enumerate(zip(self.Bs, self.ns), start=1):
                    if b.dim != n:
                        raise ValueError(f"B_{j} must be {n}x{n}")
            for j in range(self.k):
                if not self.alphas[j] + self.ns[j] > 0:
                    bad.append(
                        f"alpha_{j + 1} + n_{j + 1} > 0 (got {self.alphas[j] + self.ns[j]!r})"
                    )
            if not self.alphas[-1] > 0:
                bad.append(f"alpha_{{k+1}} > 0 (got {self.alphas[-1]!r})")
        if bad:
            raise DomainError(bad, context=f"invalid {self.kind} measure")

    def to_json(self) -> dict:
        doc: dict = {
            "kind": self.kind,
            "p": self.p,
            "k": self.k,
            "alphas": list(self.alphas),
        }
        if self.ns is not None:
            doc["ns"] = list(self.ns)
        if self.Bs is not None:
            doc["Bs"] = [b.to_json() for b in self.Bs]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "MeasureSpec":
        bs = doc.get("Bs")
        return cls(
            kind=doc["kind"],
            p=int(doc["p"]),
            k=int(doc["k"]),
            alphas=tuple(doc["alphas"]),
            ns=tuple(doc["ns"]) if doc.get("ns") is not None else None,
            Bs=tuple(HermitianMatrix.from_json(b) for b in bs) if bs else None,
        )


@dataclass(frozen=True)
class DirichletSample:
    """One draw from a Dirichlet measure: k Hermitian matrices (1x1 => scalars)."""

    matrices: tuple[HermitianMatrix, ...] = field(default_factory=tuple)

    @property
    def scalars(self) -> tuple[float, ...]:
        return tuple(float(m.array[0, 0].real) for m in self.matrices)

    def to_json(self) -> dict:
        return {"matrices": [m.to_json() for m in self.matrices]}


# ---------------------------------------------------------------------------
# batch generation (the Monte Carlo workhorses)


def _matrix_gamma_batch(rng: CounterRng, p: int, alpha: float, n: int) -> np.ndarray:
    """n draws of the p x p complex matrix gamma, as an (n, p, p) stack."""
    if p == 1:
        return rng.gammas(alpha, n).reshape(n, 1, 1).astype(np.complex128)
    t = np.zeros((n, p, p), dtype=np.complex128)
    for j in range(p):
        t[:, j, j] = np.sqrt(rng.gammas(alpha - j, n))
    for i in range(1, p):
        for j in range(i):
            t[:, i, j] = rng.complex_normals(n)
    return t @ t.conj().transpose(0, 2, 1)


def _inv_sqrt_batch(s: np.ndarray) -> np.ndarray:
    """Hermitian inverse square roots of an (n, p, p) positive definite stack.

    Eigenvalues below EIG_FLOOR_RTOL * lambda_max are floored (and counted)
    so that one near-singular sum cannot abort a long run.
    """
    global _floor_events
    w, v = np.linalg.eigh(s)
    floor = EIG_FLOOR_RTOL * w[:, -1:]
    n_floored = int(np.count_nonzero(w < floor))
    if n_floored:
        _floor_events += n_floored
        logger.warning("floored %d near-zero eigenvalues in inverse sqrt", n_floored)
        w = np.maximum(w, floor)
    return (v * (1.0 / np.sqrt(w))[:, None, :]) @ v.conj().transpose(0, 2, 1)


def _symmetrize(x: np.ndarray) -> np.ndarray:
    return (x + x.conj().transpose(0, 2, 1)) / 2.0


def sample_batch(spec: MeasureSpec, seed: SeedSpec, n: int, chunk: int = 0) -> np.ndarray:
    """n draws from the measure as a (k, n, p, p) complex stack.

    The output is a pure function of (seed, stream, chunk, n), which is
    what makes chunked Monte Carlo independent of worker scheduling.
    """
    spec.validate()
    rng = seed.child(chunk)
    k, p = spec.k, spec.p
    alphas = spec.alphas

    if spec.kind == "rect_type1_p1":
        shapes = [alphas[j] + spec.ns[j] for j in range(k)]
        g = np.stack([rng.gammas(a, n) for a in shapes])
        g0 = rng.gammas(alphas[-1], n)
        u = g / (g.sum(axis=0) + g0)
        _check_rect_support(u, type1=True)
        return u.reshape(k, n, 1, 1).astype(np.complex128)

    if spec.kind == "rect_type2_p1":
        shapes = [alphas[j] + spec.ns[j] for j in range(k)]
        g = np.stack([rng.gammas(a, n) for a in shapes])
        g0 = rng.gammas(alphas[-1], n)
        u = g / g0
        _check_rect_support(u, type1=False)
        return u.reshape(k, n, 1, 1).astype(np.complex128)

    if p == 1:
        w = np.stack([rng.gammas(a, n) for a in alphas])
        if spec.kind == "type1":
            x = w[:k] / w.sum(axis=0)
        else:
            x = w[:k] / w[-1]
        return x.reshape(k, n, 1, 1).astype(np.complex128)

    w = [_matrix_gamma_batch(rng, p, a, n) for a in alphas]
    if spec.kind == "type1":
        r = _inv_sqrt_batch(np.sum(w, axis=0))
    else:
        r = _inv_sqrt_batch(w[-1])
    out = np.stack([_symmetrize(r @ wj @ r) for wj in w[:k]])
    if spec.kind == "type1":
        # I - sum X_j > O forces the traces to sum below p.
        tr = np.einsum("knii->n", out).real
        if np.any(tr > p + 1e-9):
            raise SamplerError(
                f"type-1 trace aggregate exceeded p at sample {int(np.argmax(tr > p + 1e-9))}"
            )
    return out


def _check_rect_support(u: np.ndarray, type1: bool) -> None:
    if np.any(u <= 0):
        raise SamplerError("rectangular sample with non-positive form value")
    if type1 and np.any(u.sum(axis=0) >= 1):
        raise SamplerError("rectangular type-1 sample with form values summing past 1")


# ---------------------------------------------------------------------------
# single-draw operations


def sample_matrix_gamma(p: int, alpha: float, seed: SeedSpec) -> HermitianMatrix:
    """One draw with density proportional to |det W|^(alpha-p) exp(-tr W)."""
    if not alpha > p - 1:
        raise DomainError(
            [f"alpha > p - 1 (got {alpha!r}, p = {p})"],
            context="matrix gamma sampler",
        )
    w = _matrix_gamma_batch(seed.child(0), p, float(alpha), 1)
    return HermitianMatrix(_symmetrize(w)[0])


def _single(spec: MeasureSpec, seed: SeedSpec) -> DirichletSample:
    batch = sample_batch(spec, seed, 1)
    return DirichletSample(
        matrices=tuple(HermitianMatrix(batch[j, 0]) for j in range(spec.k))
    )


def sample_type1(spec: MeasureSpec, seed: SeedSpec) -> DirichletSample:
    """One type-1 draw: each X_j and I - sum X_j Hermitian positive definite."""
    if spec.kind != "type1":
        raise ValueError(f"expected a type1 spec, got {spec.kind!r}")
    return _single(spec, seed)


def sample_type2(spec: MeasureSpec, seed: SeedSpec) -> DirichletSample:
    """One type-2 draw: each X_j Hermitian positive definite."""
    if spec.kind != "type2":
        raise ValueError(f"expected a type2 spec, got {spec.kind!r}")
    return _single(spec, seed)


def sample_rect_p1(spec: MeasureSpec, seed: SeedSpec) -> DirichletSample:
    """One rectangular p=1 draw of the induced Hermitian form values u_j."""
    if not spec.rectangular:
        raise ValueError(f"expected a rectangular spec, got {spec.kind!r}")
    return _single(spec, seed)
