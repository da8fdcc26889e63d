"""
Exception types raised by the factorization library.
"""


class OrthoFactError(Exception):
    """Base class for all library errors."""


class DimensionMismatchError(OrthoFactError, ValueError):
    """Matrix shapes do not conform."""


class NegativeEntryError(OrthoFactError, ValueError):
    """A matrix that must be non-negative has a negative entry."""


class InstanceGenerationError(OrthoFactError, ValueError):
    """Synthetic instance parameters are invalid or generation cannot proceed."""


class MatrixFormatError(OrthoFactError, ValueError):
    """A matrix text file contains a value that is not a number."""

    def __init__(self, message: str, path: str = None, line: int = None):
        self.path = path
        self.line = line
        location = ''
        if path is not None:
            location = f" ({path}" + (f", line {line}" if line is not None else '') + ")"
        super().__init__(f"{message}{location}")


class RaggedRowsError(MatrixFormatError):
    """Rows of a matrix text file have different lengths."""


class InstanceFilenameError(OrthoFactError, ValueError):
    """A file name does not follow the NMF_{BIOG|UNION}_data_... convention."""


class InstanceConsistencyError(OrthoFactError, ValueError):
    """Companion factor files do not multiply back to R."""


class InstanceIOError(OrthoFactError, OSError):
    """Reading or writing an instance file failed."""

    def __init__(self, message: str, path: str):
        self.path = path
        super().__init__(f"{message}: {path}")


class ConfigError(OrthoFactError, ValueError):
    """Solver or harness configuration is invalid."""


class ReportFormatError(OrthoFactError, ValueError):
    """A raw benchmark CSV cannot be parsed."""
