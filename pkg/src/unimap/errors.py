"""Exception types shared across the package."""

from __future__ import annotations


class UnimapError(Exception):
    """Base class for all package-specific errors."""


class MalformedMapError(UnimapError, ValueError):
    """The permutation pair does not describe a map."""


class GenusError(UnimapError, ValueError):
    """An operation needs genus >= 1 (or a consistent genus) and did not get it."""


class EnumerationCapError(UnimapError, ValueError):
    """An exhaustive enumeration was requested above its configured cap."""


class SamplerExhaustedError(UnimapError, RuntimeError):
    """A rejection sampler ran out of attempts.

    Carries the attempt count and the acceptance rate observed so far so the
    caller can judge whether the target was merely unlucky or infeasible.
    """

    def __init__(self, message: str, attempts: int, accepted: int) -> None:
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.attempts if self.attempts else 0.0


class EmptySideError(UnimapError, ValueError):
    """A cut was evaluated with an empty side."""


class DisconnectedGraphError(UnimapError, ValueError):
    """The operation is only defined for connected graphs."""


class ParameterError(UnimapError, ValueError):
    """A numeric parameter is outside its admissible range."""


class InfeasibleConstantsError(UnimapError, RuntimeError):
    """The constant pipeline found no feasible value on its search grid."""


class DecompositionError(UnimapError, ValueError):
    """A branch decomposition is internally inconsistent."""
