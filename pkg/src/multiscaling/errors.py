"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class MultiscalingError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MultiscalingError, ValueError):
    """Invalid argument or parameter (maps to CLI usage error, exit 2)."""


class DataError(MultiscalingError):
    """Unusable input data, e.g. unreadable or empty files (CLI exit 3)."""


class EstimationError(MultiscalingError):
    """An estimator could not produce a meaningful result (CLI exit 4)."""


class UsageError(MultiscalingError):
    """Bad command-line usage outside argparse's own checks (CLI exit 2)."""
