"""Exception types raised by the trajproto pipeline."""


class TrajprotoError(Exception):
    """Base class for all pipeline errors."""


class DegenerateTrajectoryError(TrajprotoError):
    """Raised for samples whose endpoints (nearly) coincide and thus cannot be scale-normalized."""


class EmptyResultError(TrajprotoError):
    """Raised when an operation that must yield at least one sample yields none."""


class DivergedTrainingError(TrajprotoError):
    """Raised when a training loss becomes non-finite; the message names the epoch."""


class ParseError(TrajprotoError):
    """Raised for malformed input files; the message names the offending line."""


class ModelFormatError(TrajprotoError):
    """Raised for corrupt, truncated, or otherwise unreadable model files."""


class UnsupportedVersionError(ModelFormatError):
    """Raised when a model file declares a format version this build does not understand."""
