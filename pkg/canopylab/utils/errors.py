"""
Exception hierarchy.

Every error raised by the library derives from CanopyLabError and carries
the process exit code the CLI should use for it.
"""

from typing import Optional


class CanopyLabError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1


# ============================================================================
# USAGE (exit code 2)
# ============================================================================
class ParameterError(CanopyLabError, ValueError):
    """An argument is outside its documented range."""

    exit_code = 2


# ============================================================================
# INPUT AND PARSING (exit code 3)
# ============================================================================
class InputError(CanopyLabError):
    """Input data is missing, malformed or inconsistent."""

    exit_code = 3


class MalformedFileError(InputError):
    """A file does not match its format at all (e.g. wrong signature)."""


class UnsupportedFormatError(InputError):
    """A recognised file uses a variant this library does not decode."""

    def __init__(self, message: str, format_id: Optional[int] = None) -> None:
        super().__init__(message)
        self.format_id = format_id


class TruncationError(InputError):
    """A file ends before the data its header promises."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class PointParseError(InputError):
    """A text point record could not be parsed."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class PointValidationError(InputError):
    """A decoded point violates the point invariants."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        offset: Optional[int] = None,
        index: Optional[int] = None,
    ) -> None:
        if line is not None:
            where = f"line {line}"
        elif offset is not None:
            where = f"byte offset {offset}"
        else:
            where = f"point {index}"
        super().__init__(f"{where}: {message}")
        self.line = line
        self.offset = offset
        self.index = index


class HeaderError(InputError):
    """A raster file header is missing a key or has a bad value."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class DimensionMismatchError(InputError):
    """Raster data does not match the dimensions its header declares."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class ModelFormatError(InputError):
    """A model file has a bad magic, version or length."""


class RuleSyntaxError(InputError):
    """A rule expression does not match the grammar."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownLayerError(InputError):
    """A rule references a layer outside the statistics vocabulary."""

    def __init__(self, token: str, position: int) -> None:
        super().__init__(f"unknown layer '{token}' at position {position}")
        self.token = token
        self.position = position


class GridMismatchError(InputError):
    """Two rasters that must share a grid do not."""


class NoOverlapError(InputError):
    """Two grids are spatially disjoint."""


class AoiError(InputError):
    """An area of interest does not lie inside its grid."""


class BandMismatchError(InputError):
    """A multiband raster lacks the bands an operation requires."""


class EmptyInputError(InputError):
    """An operation received an empty input it cannot work on."""


class InsufficientClassError(InputError):
    """A training mask has no valid cell for one of the classes."""


class ManifestError(InputError):
    """A run manifest is malformed or references missing files."""


class SceneSpecError(InputError):
    """A synthetic scene specification is inconsistent."""


# ============================================================================
# NUMERIC (exit code 4)
# ============================================================================
class NumericError(CanopyLabError, ArithmeticError):
    """A computation produced non-finite values or did not converge."""

    exit_code = 4


class UndefinedBaselineError(NumericError):
    """Relative change requested against a zero baseline area."""


# ============================================================================
# INTERNAL (exit code 5)
# ============================================================================
class InternalError(CanopyLabError):
    """An internal invariant was violated; this indicates a bug."""

    exit_code = 5


# ============================================================================
# PIPELINE
# ============================================================================
class StageError(CanopyLabError):
    """A pipeline stage failed; wraps the underlying error."""

    def __init__(self, stage: str, cause: BaseException) -> None:
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", InternalError.exit_code)
