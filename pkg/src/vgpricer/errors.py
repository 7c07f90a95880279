"""Exception hierarchy for the pricing library.

Every error raised on purpose derives from :class:`VgError`, so callers can
catch a single base class.  The CLI maps subclasses onto exit codes.
"""


class VgError(Exception):
    """Base class for all library errors."""


class InvalidParameters(VgError):
    """Model or market inputs violate a validity constraint."""


class PoleError(VgError):
    """Gamma function evaluated too close to a non-positive integer."""


class GammaOverflowError(VgError):
    """Gamma value exceeds the representable floating-point range."""


class BranchCutError(VgError):
    """Complex base of the characteristic function lies on the log branch cut."""


class DegenerateAlphaError(VgError):
    """Series exponent tau/nu - 1/2 is (half-)integral; the residue series degenerates."""


class NonConvergenceError(VgError):
    """Series truncation estimate too large relative to the accumulated value.

    The partially converged result is attached as ``.result`` so diagnostic
    consumers (e.g. table reproduction) can still inspect the truncated value.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DampingOutOfRangeError(VgError):
    """Carr-Madan damping factor violates the square-integrability bound."""


class UnsupportedBranchError(VgError):
    """Requested moneyness branch has no closed-form series (ITM log call)."""
