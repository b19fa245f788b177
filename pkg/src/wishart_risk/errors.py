"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: usage problems exit 1, regime/domain
violations exit 2, file problems exit 3.
"""


class WishartRiskError(Exception):
    """Base class for all package errors."""


class UsageError(WishartRiskError):
    """Invalid arguments or configuration (CLI exit 1)."""


class DimensionError(WishartRiskError, ValueError):
    """Shape or length mismatch between inputs."""


class UnsupportedSizeError(WishartRiskError, ValueError):
    """Combinatorial order outside the supported range."""


class ParameterError(WishartRiskError, ValueError):
    """Parameter outside its admissible range (e.g. decay factor)."""


class RegimeError(WishartRiskError):
    """Sample-size regime where a formula is undefined (e.g. q too small)."""


class DomainError(WishartRiskError):
    """Mathematical domain violation (non-SPD input, nonpositive factor)."""


class DegeneratePortfolioError(DomainError):
    """Grand sum of the inverse covariance vanishes; weights undefined."""


class DegenerateWeightingError(DomainError):
    """Weighting matrix with zero trace; estimator undefined."""


class SingularParameterError(DomainError):
    """Weingarten Gram matrix numerically singular for the given parameter."""

    def __init__(self, k, z, detail=""):
        self.k = k
        self.z = z
        msg = f"Gram matrix singular for k={k}, parameter z={z}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ParseError(WishartRiskError):
    """Malformed input file (CLI exit 3); carries row/column context."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = ""
        if row is not None:
            where = f" at row {row}"
            if column is not None:
                where += f", column {column}"
        super().__init__(message + where)


class DataError(WishartRiskError):
    """Data set unusable for the requested computation (too few rows, ...)."""
