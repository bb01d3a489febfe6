"""Exception types shared across the package."""


class BettingLabError(Exception):
    """Base class for all package errors."""


class StructuralError(BettingLabError):
    """Malformed data: missing table entries, negative capital, bad bit strings."""


class PreconditionError(BettingLabError):
    """An operation was called on inputs that violate its stated preconditions."""


class UnsupportedError(BettingLabError):
    """The requested computation is outside the decidable fragment we implement."""


class EngineBankruptError(BettingLabError):
    """The diagonalization engine's capital hit zero and froze before the target."""
