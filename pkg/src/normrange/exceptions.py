"""Exception hierarchy shared across the package."""


class NormRangeError(Exception):
    """Base class for all package-specific errors."""


class DomainError(NormRangeError, ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class FarTailError(NormRangeError):
    """Truncation bounds lie so deep in one tail that the normalizing mass
    underflows to zero in double precision."""


class NumericalError(NormRangeError):
    """A numerical routine (root bracketing, sampler internals) failed."""


class ValidationError(NormRangeError):
    """Summary statistics violate one or more input invariants.

    Carries the machine-readable violation codes from ``core.validate``.
    """

    def __init__(self, codes):
        self.codes = list(codes)
        super().__init__("invalid summary statistics: " + ", ".join(self.codes))
