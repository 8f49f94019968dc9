"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so new error types should
subclass one of the three mid-level classes rather than NetacorrError
directly.
"""


class NetacorrError(Exception):
    """Base class for all errors raised by this package."""


class InputError(NetacorrError):
    """Malformed or inconsistent user input (exit code 2)."""


class SingularDesignError(InputError):
    """Rank-deficient design matrix."""


class BadCovarianceError(InputError):
    """Covariance/kinship matrix not symmetric positive (semi)definite."""


class DegenerateStatisticError(NetacorrError):
    """Statistic undefined for this input, e.g. zero variance (exit code 3)."""


class NumericError(NetacorrError):
    """Numeric failure inside an otherwise valid computation (exit code 4)."""
