"""Exception hierarchy.

Every error carries a short ``code`` (``"NotRich"``, ``"QuotaUnmet"``, ...)
that the CLI prints verbatim, so scripts can match on it.
"""

from __future__ import annotations


class AlpernError(Exception):
    code = "AlpernError"

    def __init__(self, message: str, column: str | None = None):
        self.column = column
        if column is not None:
            message = f"column {column}: {message}"
        super().__init__(message)

    def __str__(self) -> str:
        return f"{self.code}: {super().__str__()}"


class ZeroCellError(AlpernError):
    code = "ZeroCell"


class BreakpointOffGridError(AlpernError):
    code = "BreakpointOffGrid"


class FormatSyntaxError(AlpernError):
    code = "SyntaxError"

    def __init__(self, message: str, lineno: int):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class ValidationError(AlpernError):
    code = "ValidationError"

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NegativeMassError(AlpernError):
    code = "NegativeMass"


class NotRichError(AlpernError):
    code = "NotRich"


class ExhaustedError(AlpernError):
    code = "Exhausted"


class TooShortError(AlpernError):
    code = "TooShort"


class QuotaNegativeError(AlpernError):
    code = "QuotaNegative"


class QuotaUnmetError(AlpernError):
    code = "QuotaUnmet"


class MisalignedHandoffError(AlpernError):
    code = "MisalignedHandoff"


class AQuotaUnmetError(AlpernError):
    code = "AQuotaUnmet"


class GridTooLargeError(AlpernError):
    code = "GridTooLarge"


# raised by the construction pipeline; the CLI maps these to exit status 3
CONSTRUCTION_ERRORS = (
    NotRichError,
    TooShortError,
    QuotaNegativeError,
    QuotaUnmetError,
    MisalignedHandoffError,
    AQuotaUnmetError,
    NegativeMassError,
)
