"""Deterministic random variate generation.

All randomness flows from a counter-based Philox generator keyed by a
(seed, stream) pair, so a given SeedSpec always reproduces the same
sequence regardless of process, worker count, or platform. Uniform doubles
are derived from the raw 64-bit counter output here (not through a
Generator object), normals by the Box-Muller transform, and gamma variates
by Marsaglia-Tsang rejection with the usual shape boost below 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_U64_MAX = 2**64 - 1


@dataclass(frozen=True)
class SeedSpec:
    """A (seed, stream) pair that fully determines a random sequence."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            v = getattr(self, name)
            if not 0 <= v <= _U64_MAX:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def child(self, index: int) -> "CounterRng":
        """Independent substream for a fixed chunk index."""
        return CounterRng(self, chunk=index)

    def to_json(self) -> dict:
        return {"seed": self.seed, "stream": self.stream}

    @classmethod
    def from_json(cls, doc: dict) -> "SeedSpec":
        return cls(seed=int(doc["seed"]), stream=int(doc.get("stream", 0)))


class CounterRng:
    """Variate source for one (seed, stream, chunk) triple.

    Within an instance, generation is sequential; distinct triples give
    statistically independent, non-overlapping streams.
    """

    def __init__(self, seed: SeedSpec, chunk: int = 0):
        ss = np.random.SeedSequence(entropy=seed.seed, spawn_key=(seed.stream, chunk))
        self._bits = np.random.Philox(ss)

    def uniforms(self, n: int) -> np.ndarray:
        """n doubles uniform on (0, 1]; never exactly zero, so logs are finite."""
        raw = self._bits.random_raw(n)
        return ((raw >> np.uint64(11)) + np.uint64(1)) * (2.0**-53)

    def normals(self, n: int) -> np.ndarray:
        """n standard normals via Box-Muller on consecutive uniform pairs."""
        m = (n + 1) // 2
        u = self.uniforms(2 * m)
        r = np.sqrt(-2.0 * np.log(u[:m]))
        theta = (2.0 * math.pi) * u[m:]
        out = np.empty(2 * m)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        return out[:n]

    def gammas(self, shape: float, n: int) -> np.ndarray:
        """n draws from Gamma(shape, 1) for any shape > 0.

        Marsaglia-Tsang squeeze-free rejection for shape >= 1; smaller
        shapes are boosted by one and scaled back with a uniform power.
        """
        if not shape > 0:
            raise ValueError(f"shape must be > 0, got {shape!r}")
        if n == 0:
            return np.empty(0)
        if shape < 1.0:
            g = self.gammas(shape + 1.0, n)
            u = self.uniforms(n)
            return g * u ** (1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / math.sqrt(9.0 * d)
        out = np.empty(n)
        pending = np.arange(n)
        while pending.size:
            m = pending.size
            x = self.normals(m)
            u = self.uniforms(m)
            v = (1.0 + c * x) ** 3
            ok = v > 0.0
            logv = np.log(np.where(ok, v, 1.0))
            accept = ok & (np.log(u) < 0.5 * x * x + d - d * v + d * logv)
            out[pending[accept]] = d * v[accept]
            pending = pending[~accept]
        return out

    def complex_normals(self, n: int, var_per_part: float = 0.5) -> np.ndarray:
        """n complex draws whose real and imaginary parts are centered
        normals with the given per-component variance."""
        s = math.sqrt(var_per_part)
        z = self.normals(2 * n)
        return s * (z[0::2] + 1j * z[1::2])
