"""Exception types shared across the package.

Every error raised by the library derives from :class:`TexclassError`, so
callers can catch one base class at pipeline boundaries. OS-level read and
write failures are left as plain :class:`OSError` (aliased ``IoFailure``).
"""


class TexclassError(Exception):
    """Base class for all library errors."""


# image decoding / preprocessing

class UnsupportedFormatError(TexclassError):
    """Input bytes are not in a raster format this build can decode."""


class CorruptFileError(TexclassError):
    """Raster file is truncated or its header disagrees with its payload."""


class ZeroDimensionError(TexclassError, ValueError):
    """Requested output width or height is smaller than one pixel."""


class BadLevelCountError(TexclassError, ValueError):
    """Quantization level count outside the supported [2, 256] range."""


# extraction

class NoValidPairsError(TexclassError):
    """Image too small to contain any pixel pair at the requested offset."""


class ImageTooSmallError(TexclassError):
    """Image has no interior pixels (both sides must be at least 3)."""


# features

class EmptyTrainingSetError(TexclassError, ValueError):
    """Standardizer or model fitting received fewer vectors than required."""


class MixedLengthsError(TexclassError, ValueError):
    """Feature vectors in one set do not all share the same length."""


class DimensionMismatchError(TexclassError, ValueError):
    """Vector length differs from what a model or transform expects."""


class SchemaMismatchError(TexclassError):
    """Feature CSV header disagrees with the expected layout or variant."""


# classification

class InsufficientDataError(TexclassError, ValueError):
    """Not enough training samples to fit the requested model."""


class VersionMismatchError(TexclassError):
    """Serialized model carries an unknown format tag or version."""


# evaluation

class ClassTooSmallError(TexclassError, ValueError):
    """A class has too few samples for a stratified split."""


class UnknownLabelError(TexclassError, ValueError):
    """A label does not appear in the configured class list."""


class LengthMismatchError(TexclassError, ValueError):
    """Actual and predicted label sequences have different lengths."""


class EmptyMatrixError(TexclassError, ValueError):
    """Metrics requested for a confusion matrix with no samples."""


# datasets

class EmptyDatasetError(TexclassError):
    """Dataset directory contains class folders but no readable images."""


class NoClassesError(TexclassError):
    """Dataset directory contains no class subdirectories."""


class BadSpecError(TexclassError, ValueError):
    """Synthetic dataset parameters outside their valid ranges."""


IoFailure = OSError
