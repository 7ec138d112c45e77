"""Exception hierarchy.

Every class carries an ``exit_code`` that the command line maps to the
process status: 2 for bad input, 3 for a violated statistical
precondition, 4 for data-dependent failures.
"""

from __future__ import annotations


class PanelGrangerError(Exception):
    exit_code = 1


# -- input problems (exit code 2) -------------------------------------------


class InputError(PanelGrangerError, ValueError):
    exit_code = 2


class DomainError(InputError):
    """An argument lies outside the domain of the function."""


class ConfigError(InputError):
    """Invalid simulation configuration."""


class ParseError(InputError):
    """A data file could not be parsed.

    ``row`` and ``column`` locate the offending cell when known.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class JoinError(InputError):
    def __init__(self, message: str, unmatched: list[str] | None = None):
        self.unmatched = list(unmatched or [])
        if self.unmatched:
            shown = ", ".join(self.unmatched[:10])
            more = "" if len(self.unmatched) <= 10 else f" (+{len(self.unmatched) - 10} more)"
            message = f"{message}: {shown}{more}"
        super().__init__(message)


# -- statistical preconditions (exit code 3) --------------------------------


class StatisticalError(PanelGrangerError):
    exit_code = 3


class DimensionMismatch(StatisticalError, ValueError):
    pass


class RankDeficient(StatisticalError):
    """The design matrix does not have numerically full column rank."""


class InsufficientData(StatisticalError):
    pass


class DegenerateSeries(StatisticalError):
    """Residual variance is (numerically) zero, so the test statistic is undefined."""


class NonFiniteBootstrapSeries(StatisticalError):
    pass


class MemberError(StatisticalError):
    """A per-member failure, tagged with the member label."""

    def __init__(self, label: str, cause: Exception):
        super().__init__(f"member {label!r}: {type(cause).__name__}: {cause}")
        self.label = label
        self.cause = cause


# -- data-dependent outcomes (exit code 4) ----------------------------------


class DataError(PanelGrangerError):
    exit_code = 4


class OrderNotFound(DataError):
    pass


class EmptyPanel(DataError):
    pass
