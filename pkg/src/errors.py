"""Error hierarchy shared by all modules.

Every error carries the process exit code the command line maps it to:
0 ok, 1 config, 2 io, 3 data, 4 cohort, 5 shape.
"""

from typing import Any


class GraphocogError(Exception):
    """Base class for all pipeline errors."""

    exit_code: int = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def __str__(self) -> str:
        return self.message


# Config (exit 1)


class ConfigError(GraphocogError, ValueError):
    """Invalid or inconsistent run configuration."""

    exit_code = 1


class DuplicateCombination(ConfigError):
    """The same channel combination was requested twice in one sweep."""


class InvalidChannelSelection(ConfigError):
    """Channel selection has the wrong size or repeats a channel."""


# IO (exit 2)


class DataIoError(GraphocogError, OSError):
    """File-system failure while reading or writing artifacts."""

    exit_code = 2


# Data (exit 3)


class DataError(GraphocogError, ValueError):
    """Input data failed validation."""

    exit_code = 3


class ParseError(DataError):
    """Malformed manifest line or recording file."""

    def __init__(self, message: str, line: int | None = None, **context: Any):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, line=line, **context)
        self.line = line


class UnknownGroup(ParseError):
    """Group value outside {CTL, PD, PDM, AD}."""


class UnknownTask(ParseError):
    """Task value outside the 14-task enum."""


class MissingFile(DataError):
    """A manifest entry references a file that does not exist."""


class DuplicateEntry(DataError):
    """A manifest repeats a (subject_id, task, data_path) triple."""


class TooShort(DataError):
    """Fewer than two samples."""


class NonFinite(DataError):
    """A recording row holds a NaN or infinite value."""

    def __init__(self, message: str, row: int, **context: Any):
        super().__init__(f"row {row}: {message}", row=row, **context)
        self.row = row


class NonMonotonicTime(DataError):
    """Timestamps decrease somewhere in a recording."""


class DegenerateTime(DataError):
    """All timestamps are equal once duplicates are collapsed."""


class EmptySignal(DataError):
    """STFT requested on an empty signal."""


class UnknownChannel(DataError):
    """Channel name not present in a channel set."""


class LengthMismatch(DataError):
    """Channel sequences differ in length."""


class InvalidWindow(DataError):
    """Non-positive frame window."""


class InvalidLength(DataError):
    """Window length below two samples."""


class EmptyManifest(DataError):
    """Manifest has no entries (or none left after filtering)."""


class EmptyTaskSubset(DataError):
    """The requested task is absent from the cohort."""


class EmptyTestSet(DataError):
    """Evaluation requested on zero samples."""


class RecordingValidationError(DataError):
    """One or more recordings referenced by a manifest failed validation."""

    def __init__(self, offenders: list[tuple[str, str]]):
        lines = "\n".join(f"  {path}: {reason}" for path, reason in offenders)
        super().__init__(
            f"{len(offenders)} recording(s) failed validation:\n{lines}",
            offenders=offenders,
        )
        self.offenders = offenders


# Cohort (exit 4)


class CohortError(GraphocogError, ValueError):
    """Cohort cannot support the requested protocol."""

    exit_code = 4


class TooFewSubjects(CohortError):
    """Fewer subjects than folds."""


# Shape (exit 5)


class ShapeError(GraphocogError, ValueError):
    """Tensor shapes do not fit the network."""

    exit_code = 5


class ShapeMismatch(ShapeError):
    """Operand shapes are incompatible."""


class EmptyFrameList(ShapeError):
    """Frame-wise forward pass received no frames."""


class EmptySequence(ShapeError):
    """Recurrent forward pass received an empty sequence."""
