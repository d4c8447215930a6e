"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: configuration problems exit 2,
failed order verification exits 3, and exhausted budgets exit 4.
"""


class AmpsupError(Exception):
    """Base class for every error raised by the package."""


class InputError(AmpsupError, ValueError):
    """An argument is outside the documented domain of an operation."""


class ConfigurationError(AmpsupError):
    """Algebra parameters or order data are malformed or inconsistent."""


class VerificationError(AmpsupError):
    """An order failed verification, or an audit detected an inconsistency."""


class InconsistencyError(VerificationError):
    """Internal cross-checks disagree (e.g. odd number of ramified primes)."""


class ResourceError(AmpsupError):
    """A computation ran out of its element or refinement budget.

    ``partial`` carries whatever was computed before the budget ran out.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class PrecisionError(ResourceError):
    """A truncated series could not meet the requested tail tolerance."""


class ConditioningError(AmpsupError):
    """A floating-point factorisation failed (e.g. Cholesky at extreme heights)."""


class DegenerateAmplifierError(AmpsupError, ValueError):
    """The amplifier has empty support, so the lower bound vanishes."""
