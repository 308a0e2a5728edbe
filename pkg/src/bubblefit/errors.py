"""Exception types shared across the package.

Analysis routines raise subclasses of :class:`BubbleFitError` so callers can
distinguish domain failures (degenerate windows, insufficient ensembles, ...)
from programming errors.  Validation-style errors also subclass
:class:`ValueError` so they behave naturally in generic code.
"""


class BubbleFitError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(BubbleFitError, ValueError):
    """Input data violates a structural invariant (ordering, positivity, ...)."""


class CsvParseError(BubbleFitError, ValueError):
    """A CSV row could not be parsed; carries the 1-based line number."""

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class ModelDomainError(BubbleFitError, ValueError):
    """Model evaluated outside its domain (for example t >= t_c)."""


class InsufficientDataError(BubbleFitError, ValueError):
    """Too few observations (or too short a span) for the requested operation."""


class NoAdmissibleWindowsError(BubbleFitError):
    """Every requested window start was dropped for holding too few points."""


class DegenerateWindowError(BubbleFitError):
    """The linear subproblem is rank deficient on this window."""


class FitFailureError(BubbleFitError):
    """No grid node yielded a nondegenerate linear subproblem."""


class InsufficientEnsembleError(BubbleFitError):
    """Fewer than the minimum usable critical-time samples; carries partial fits."""

    def __init__(self, message: str, fits=()):
        super().__init__(message)
        self.fits = tuple(fits)


class InsufficientOverlapError(BubbleFitError, ValueError):
    """Two series do not overlap long enough for the requested lags/steps."""


class UndefinedCorrelationError(BubbleFitError):
    """A correlation is undefined because one increment sequence has zero variance."""


class DegenerateSpectrumError(BubbleFitError):
    """The leading eigenvalue is not separated from the second."""
