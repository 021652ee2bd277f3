"""Exception hierarchy; every error carries the CLI exit code it maps to."""

from typing import Optional

from .config import EXIT_CODES


class DiscTCError(ValueError):
    """Base class for all toolkit errors."""

    exit_code = EXIT_CODES["validation"]


class ParseError(DiscTCError):
    """Malformed input file or payload."""

    exit_code = EXIT_CODES["parse"]

    def __init__(self, message: str, location: Optional[str] = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class DimensionMismatchError(DiscTCError):
    pass


class IndexOutOfRangeError(DiscTCError):
    pass


class ZeroPolynomialError(DiscTCError):
    pass


class InvalidActionRowError(DiscTCError):
    """A row of Ξ is not a homogeneisation of Δ."""

    def __init__(self, row: int, detail: str = ""):
        self.row = row
        message = f"row {row} of the action matrix is not a homogeneisation"
        super().__init__(f"{message}: {detail}" if detail else message)


class UnachievablePatternError(DiscTCError):
    pass


class PatternCapExceededError(DiscTCError):
    pass


class ZeroLocusError(DiscTCError):
    """Evaluation requested at a point where the discriminant vanishes."""


class NotCentredError(DiscTCError):
    pass


class CoincidentPointsError(DiscTCError):
    pass


class ExpansionCapError(DiscTCError):
    pass


class BoundMismatchError(DiscTCError):
    pass


class CatalogUnavailableError(DiscTCError):
    pass


class SvgUnavailableError(DiscTCError):
    """SVG output was requested without the `svg` extra installed."""


class RootFindingError(DiscTCError):
    exit_code = EXIT_CODES["numeric"]


class FlowNotConvergedError(DiscTCError):
    exit_code = EXIT_CODES["numeric"]


class CatalogMissError(DiscTCError):
    exit_code = EXIT_CODES["numeric"]
