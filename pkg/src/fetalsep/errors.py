"""Exception types shared across the toolkit."""


class FetalsepError(Exception):
    """Base class for all toolkit errors."""


class TooShortError(FetalsepError):
    """Input signal has too few samples for the requested operation."""


class InvalidBandError(FetalsepError):
    """Filter band does not satisfy 0 < lo < hi <= fs/2."""


class BadConfigError(FetalsepError):
    """Configuration value out of range or structurally invalid."""


class ShapeMismatchError(FetalsepError):
    """Array shapes are inconsistent with the operation's contract."""


class FsMismatchError(FetalsepError):
    """Operands carry different sampling rates."""


class DegenerateSignalError(FetalsepError):
    """Signal has zero power where nonzero power is required."""


class ZeroNoiseError(FetalsepError):
    """Noise reference has zero power; SNR undefined."""


class ConstantReferenceError(FetalsepError):
    """Reference vector is constant; goodness of fit undefined."""


class DegenerateVarianceError(FetalsepError):
    """All variance components vanish; agreement index undefined."""


class ZeroEnergyError(FetalsepError):
    """Reference signal has no subband energy; distortion undefined."""


class AllTiedError(FetalsepError):
    """Every pair is tied; rank correlation undefined."""


class EmptyDatasetError(FetalsepError):
    """Training requires at least one window in each domain."""


class IoError(FetalsepError):
    """File could not be read or written."""


class VersionMismatchError(FetalsepError):
    """Checkpoint was written by an incompatible format version."""


class CorruptFileError(FetalsepError):
    """Checkpoint failed magic, length, or checksum validation."""
