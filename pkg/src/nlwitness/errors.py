"""Exception types raised by the library."""


class DimensionError(ValueError):
    """Operand shapes do not match the declared bipartite dimensions."""


class NotHermitianError(ValueError):
    pass


class NotPSDError(ValueError):
    pass


class InvalidStateError(ValueError):
    """Matrix fails the density-matrix checks (Hermitian, unit trace, PSD)."""


class NotNPTError(ValueError):
    """A construction needing a negative partial-transpose eigenvalue got a PPT state."""


class UncertifiedWitnessError(ValueError):
    """Correction terms were used without a positivity certificate."""


class MapCertificationError(ValueError):
    """A map failed the numerical positivity or trace-decreasing checks."""


class SamplerExhausted(RuntimeError):
    """Rejection sampling did not produce an accepted draw within ``max_tries``."""

    def __init__(self, message: str, acceptance_rate: float):
        super().__init__(message)
        self.acceptance_rate = acceptance_rate


class InvariantViolation(RuntimeError):
    """An internal consistency relation failed; indicates a bug."""
