"""Manifest and recording file I/O."""

from pathlib import Path

import numpy as np
import orjson
import pandas as pd
from pydantic import ValidationError

from src.errors import (
    DataError,
    DataIoError,
    DuplicateEntry,
    EmptyManifest,
    MissingFile,
    NonFinite,
    NonMonotonicTime,
    ParseError,
    RecordingValidationError,
    TooShort,
    UnknownGroup,
    UnknownTask,
)
from src.models.telemetry import Group, Manifest, ManifestEntry, Recording, Task
from src.telemetry.channels import derive_channels
from src.utils.logging import get_logger

logger = get_logger(__name__)

RECORDING_COLUMNS = ["t", "x", "y", "p"]
MANIFEST_KEYS = ("subject_id", "group", "task", "path")


def load_manifest(path: Path | str) -> Manifest:
    """
    Load a JSON-lines manifest.

    Args:
        path: Manifest file; relative ``path`` values resolve against its directory

    Returns:
        Validated Manifest with enum-typed groups and tasks

    Raises:
        ParseError, UnknownGroup, UnknownTask, MissingFile, DuplicateEntry
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except FileNotFoundError as exc:
        raise MissingFile(f"manifest not found: {path}") from exc
    except OSError as exc:
        raise DataIoError(f"cannot read manifest {path}: {exc}") from exc

    base = path.parent
    entries: list[ManifestEntry] = []
    seen: set[tuple[str, Task, str]] = set()

    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = orjson.loads(line)
        except orjson.JSONDecodeError as exc:
            raise ParseError(f"not a JSON object: {exc}", line=line_no) from exc
        if not isinstance(record, dict):
            raise ParseError("not a JSON object", line=line_no)

        if "path" not in record and "data_path" in record:
            record["path"] = record.pop("data_path")
        missing = [key for key in MANIFEST_KEYS if key not in record]
        if missing:
            raise ParseError(f"missing key(s) {missing}", line=line_no)

        group = record["group"]
        if group not in Group._value2member_map_:
            raise UnknownGroup(f"unknown group {group!r}", line=line_no)
        task = record["task"]
        if task not in Task._value2member_map_:
            raise UnknownTask(f"unknown task {task!r}", line=line_no)

        data_path = Path(str(record["path"]))
        if not data_path.is_absolute():
            data_path = base / data_path
        if not data_path.is_file():
            raise MissingFile(f"line {line_no}: recording not found: {data_path}")

        try:
            entry = ManifestEntry(
                subject_id=str(record["subject_id"]),
                group=Group(group),
                task=Task(task),
                data_path=data_path,
            )
        except ValidationError as exc:
            raise ParseError(str(exc.errors()[0]["msg"]), line=line_no) from exc

        if entry.key in seen:
            raise DuplicateEntry(
                f"line {line_no}: duplicate entry {entry.subject_id}/{entry.task.value}",
                line=line_no,
            )
        seen.add(entry.key)
        entries.append(entry)

    logger.info("manifest_loaded", path=str(path), entries=len(entries))
    return Manifest(entries=entries, source=path)


def load_recording(path: Path | str, meta: ManifestEntry) -> Recording:
    """
    Load one ``t,x,y,p`` CSV recording.

    Args:
        path: Recording file
        meta: Manifest entry supplying subject, group and task

    Returns:
        Recording with samples in file order

    Raises:
        ParseError, TooShort, NonFinite, NonMonotonicTime
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=np.float64, encoding="utf-8")
    except FileNotFoundError as exc:
        raise MissingFile(f"recording not found: {path}") from exc
    except pd.errors.EmptyDataError as exc:
        raise ParseError(f"{path}: empty file", line=1) from exc
    except (pd.errors.ParserError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from exc

    if list(frame.columns) != RECORDING_COLUMNS:
        raise ParseError(f"{path}: header must be exactly t,x,y,p", line=1)
    if len(frame) < 2:
        raise TooShort(f"{path}: {len(frame)} sample(s), need at least 2")

    values = frame.to_numpy(dtype=np.float64)
    bad_rows = np.flatnonzero(~np.isfinite(values).all(axis=1))
    if bad_rows.size:
        raise NonFinite(f"{path}: non-finite value", row=int(bad_rows[0]) + 1)
    negative = np.flatnonzero(values[:, 3] < 0)
    if negative.size:
        raise ParseError(f"{path}: negative pressure", line=int(negative[0]) + 2)
    backwards = np.flatnonzero(np.diff(values[:, 0]) < 0)
    if backwards.size:
        raise NonMonotonicTime(f"{path}: timestamp decreases after row {int(backwards[0]) + 1}")

    return Recording(
        subject_id=meta.subject_id,
        group=meta.group,
        task=meta.task,
        t=np.ascontiguousarray(values[:, 0]),
        x=np.ascontiguousarray(values[:, 1]),
        y=np.ascontiguousarray(values[:, 2]),
        p=np.ascontiguousarray(values[:, 3]),
        source=path,
    )


def load_entry(entry: ManifestEntry) -> Recording:
    """Load the recording a manifest entry points at."""
    return load_recording(entry.data_path, entry)


def validate_manifest(manifest: Manifest) -> list[tuple[str, str]]:
    """Load every recording and collect (path, reason) for the ones that fail."""
    if len(manifest) == 0:
        raise EmptyManifest("manifest has no entries")
    offenders: list[tuple[str, str]] = []
    for entry in manifest.entries:
        try:
            derive_channels(load_entry(entry))
        except DataError as exc:
            offenders.append((str(entry.data_path), str(exc)))
    if offenders:
        logger.warning("recordings_invalid", count=len(offenders))
    return offenders


def require_valid(manifest: Manifest) -> None:
    """Raise if any recording in the manifest fails validation."""
    offenders = validate_manifest(manifest)
    if offenders:
        raise RecordingValidationError(offenders)


def write_recording(path: Path, recording: Recording) -> None:
    """Write a recording in the ``t,x,y,p`` CSV format."""
    frame = pd.DataFrame(
        {"t": recording.t, "x": recording.x, "y": recording.y, "p": recording.p},
        columns=RECORDING_COLUMNS,
    )
    try:
        frame.to_csv(path, index=False, float_format="%.6f", lineterminator="\n")
    except OSError as exc:
        raise DataIoError(f"cannot write recording {path}: {exc}") from exc


def write_manifest(path: Path, entries: list[ManifestEntry]) -> None:
    """Write a JSON-lines manifest with paths relative to its directory."""
    lines = []
    for entry in entries:
        data_path = entry.data_path
        try:
            data_path = data_path.relative_to(path.parent)
        except ValueError:
            pass
        lines.append(
            orjson.dumps(
                {
                    "subject_id": entry.subject_id,
                    "group": entry.group.value,
                    "task": entry.task.value,
                    "path": data_path.as_posix(),
                }
            )
        )
    try:
        path.write_bytes(b"\n".join(lines) + (b"\n" if lines else b""))
    except OSError as exc:
        raise DataIoError(f"cannot write manifest {path}: {exc}") from exc


def cohort_summary(entries: list[ManifestEntry], durations_s: list[float]) -> pd.DataFrame:
    """Subjects, files and mean recording duration per group."""
    frame = pd.DataFrame(
        {
            "group": [e.group.value for e in entries],
            "subject_id": [e.subject_id for e in entries],
            "duration_s": durations_s,
        }
    )
    summary = frame.groupby("group", sort=True).agg(
        subjects=("subject_id", "nunique"),
        files=("subject_id", "size"),
        mean_duration_s=("duration_s", "mean"),
    )
    summary["mean_duration_s"] = summary["mean_duration_s"].round(2)
    return summary
