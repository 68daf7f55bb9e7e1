"""Exception types shared across the package."""


class CavMergeError(Exception):
    """Base class for all errors raised by cavmerge."""


class InvalidArgumentError(CavMergeError, ValueError):
    """An argument violates an operation's precondition."""


class DataError(CavMergeError, ValueError):
    """Input data could not be parsed or is unusable (ragged, non-finite, empty)."""


class DegeneratePairError(CavMergeError):
    """Two cluster centers coincide, so the axis between them is undefined."""
