"""Exception hierarchy shared across the package."""

from __future__ import annotations


class MvdaError(Exception):
    """Base class for all errors raised by this package."""


class NotPositiveDefinite(MvdaError):
    """A matrix required to be Hermitian positive definite is not."""


class NoConvergence(MvdaError):
    """An iterative reduction did not converge within its budget."""


class DomainError(MvdaError):
    """Parameter values violate the existence conditions of a quantity.

    Carries the violated conditions by name so callers (and the CLI) can
    report exactly which inequality failed instead of surfacing a NaN.
    """

    def __init__(self, violated: list[str] | tuple[str, ...], context: str = ""):
        self.violated = tuple(violated)
        head = context or "domain conditions violated"
        super().__init__(f"{head}: " + "; ".join(self.violated))


class BadWeights(MvdaError):
    """Weight vector is not a strictly positive probability vector."""


class BadSupport(MvdaError):
    """A value lies outside the support required by an operation."""


class PochhammerPole(MvdaError):
    """A denominator Pochhammer factor vanished for an enumerated partition."""


class SamplerError(MvdaError):
    """A sampler produced output violating its support constraints."""


class NonFiniteIntegrand(MvdaError):
    """An integrand evaluated to NaN/Inf during Monte Carlo estimation."""

    def __init__(self, sample_index: int, detail: str = ""):
        self.sample_index = sample_index
        msg = f"non-finite integrand value at sample index {sample_index}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
