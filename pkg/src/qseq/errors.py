"""Exception types shared across the package."""


class QseqError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(QseqError, ValueError):
    """Invalid configuration: bad seed, horizon, width, or flag values."""


class RangeError(QseqError, IndexError):
    """An index or range falls outside what a trace or table holds."""


class ValueOverflowError(QseqError):
    """A computed value would exceed the configured storage width."""


class CountOverflowError(QseqError):
    """A frequency slot would exceed its 1-byte range."""


class ParityError(QseqError):
    """An operation requiring all-odd values met an even one."""


class SaturationError(QseqError):
    """A law or peak check was asked for on a block that is not yet final."""


class TraceStateError(QseqError):
    """Operation requires a live trace (e.g. extending a dead one)."""


class CheckpointError(QseqError):
    """Base class for trace-file load failures."""


class CheckpointFormatError(CheckpointError):
    """Bad magic, unsupported version, or malformed header fields."""


class CheckpointTruncatedError(CheckpointError):
    """File ends before the declared payload does."""


class CheckpointChecksumError(CheckpointError):
    """Stored checksum does not match the file contents."""
