"""Exception types shared across the package."""


class AwgrisError(Exception):
    """Base class for all package-specific errors."""


class DomainError(AwgrisError, ValueError):
    """Input outside the mathematical domain of an operation."""


class SingularityError(AwgrisError, ArithmeticError):
    """Nonphysical parameter combination (e.g. Z_eff = -Z0)."""


class RangeError(AwgrisError, ValueError):
    """Requested value outside the achievable range.

    Carries the achievable interval so callers can rescale.
    """

    def __init__(self, message, achievable_min, achievable_max):
        super().__init__(message)
        self.achievable_min = achievable_min
        self.achievable_max = achievable_max


class ConfigError(AwgrisError, ValueError):
    """Invalid or inconsistent configuration."""


class GeometryError(AwgrisError, ValueError):
    """Degenerate scene geometry (e.g. feed coincident with a unit)."""


class ModulationUnderflowError(AwgrisError, ValueError):
    """A control input drives an ON unit below the conduction voltage."""

    def __init__(self, message, sample_index):
        super().__init__(message)
        self.sample_index = sample_index


class FeasibilityError(AwgrisError, ValueError):
    """Synthesis target cannot be realized (e.g. bandwidth beyond the
    control circuit's reliable band). Carries the band when known."""

    def __init__(self, message, band=None):
        super().__init__(message)
        self.band = band


class CoverageError(AwgrisError, ValueError):
    """Window/hop combination leaves samples without analysis coverage."""


class DegenerateFilterError(AwgrisError, ValueError):
    """Filter has no invertible content (e.g. all-zero taps)."""
