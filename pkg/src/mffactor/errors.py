"""Exception types shared across the package."""


class MFFactorError(Exception):
    """Base class for all package errors."""


class InvalidArgument(MFFactorError, ValueError):
    pass


class ResolutionTooCoarse(MFFactorError, ValueError):
    """No quadrature cell centre fell inside the domain."""


class InvalidGeometry(MFFactorError, ValueError):
    """Observation point inside or on the boundary of the support."""


class InvalidConfig(MFFactorError, ValueError):
    pass


class PositivityError(MFFactorError, ValueError):
    """Raised by strict source construction when S changes sign or vanishes."""


class IncompleteRecord(MFFactorError, KeyError):
    """A data record lacks wavenumbers that an operator assembly needs."""

    def __init__(self, missing):
        self.missing = list(missing)
        shown = ", ".join(f"{k:.17g}" for k in self.missing[:8])
        more = "" if len(self.missing) <= 8 else f" (+{len(self.missing) - 8} more)"
        super().__init__(f"record is missing wavenumbers: {shown}{more}")

    def __str__(self):
        return self.args[0]


class NumericFailure(MFFactorError, ArithmeticError):
    pass


class SingularTestPoint(MFFactorError, ValueError):
    """Sampling point coincides with the near-field sensor."""


class DegenerateSignal(MFFactorError, ValueError):
    pass


class PositivityWarning(UserWarning):
    """The space-time source violates S >= c0 > 0 on part of its support."""
