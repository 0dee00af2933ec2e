"""Exception hierarchy shared by all modules."""


class StirapError(Exception):
    """Base class for every error raised by this package."""


class UnsupportedSchemeError(StirapError, ValueError):
    pass


class SequenceOrderError(StirapError, ValueError):
    pass


class DimensionError(StirapError, ValueError):
    pass


class ResonanceError(StirapError, ValueError):
    """Two-photon resonance (delta_2 = delta_4 = 0, delta_1 = delta_3) is violated."""


class DegenerateInputError(StirapError, ValueError):
    """A mixing angle is undefined for the given field values."""


class NonHermitianError(StirapError, ValueError):
    pass


class AccuracyError(StirapError, ArithmeticError):
    """Step-halving comparison exceeded the requested tolerance."""


class CoverageError(StirapError, ValueError):
    """The time grid does not cover the support of the pulses."""


class ResolutionError(StirapError, ArithmeticError):
    """Propagation along z became unstable or unresolved."""

    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


class ConfigError(StirapError, ValueError):
    pass
