"""Pen telemetry data models."""

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from pydantic import AliasChoices, BaseModel, Field, field_validator, model_validator


class Group(str, Enum):
    """Diagnostic group of a subject."""

    CTL = "CTL"
    PD = "PD"
    PDM = "PDM"
    AD = "AD"


class Task(str, Enum):
    """The fourteen handwriting tasks."""

    POINT_RIGHT = "PointRight"
    POINT_LEFT = "PointLeft"
    POINT_SUSTAINED = "PointSustained"
    SPIRAL_RIGHT = "SpiralRight"
    SPIRAL_LEFT = "SpiralLeft"
    SPIRAL_PATAKA = "SpiralPataka"
    COPY_TEXT = "CopyText"
    COPY_READ_TEXT = "CopyReadText"
    FREE_WRITE = "FreeWrite"
    NUMBERS = "Numbers"
    COPY_IMAGE = "CopyImage"
    COPY_IMAGE_MEMORY = "CopyImageMemory"
    DRAW_CLOCK = "DrawClock"
    COPY_CUBE = "CopyCube"


class TaskGroup(str, Enum):
    """Aggregate task families."""

    SPIRAL = "Spiral"
    POINT = "Point"
    WRITING = "Writing"
    DRAWING = "Drawing"

    @property
    def tasks(self) -> tuple[Task, ...]:
        """Member tasks in display order."""
        return TASK_GROUPS[self]


TASK_GROUPS: dict[TaskGroup, tuple[Task, ...]] = {
    TaskGroup.SPIRAL: (Task.SPIRAL_PATAKA, Task.SPIRAL_RIGHT, Task.SPIRAL_LEFT),
    TaskGroup.POINT: (Task.POINT_SUSTAINED, Task.POINT_RIGHT, Task.POINT_LEFT),
    TaskGroup.WRITING: (Task.COPY_TEXT, Task.COPY_READ_TEXT, Task.FREE_WRITE, Task.NUMBERS),
    TaskGroup.DRAWING: (
        Task.COPY_IMAGE,
        Task.COPY_IMAGE_MEMORY,
        Task.COPY_CUBE,
        Task.DRAW_CLOCK,
    ),
}


class PenSample(BaseModel):
    """One digitizer sample."""

    model_config = {"frozen": True}

    t: float
    x: float
    y: float
    p: float = Field(ge=0)

    @field_validator("t", "x", "y", "p")
    @classmethod
    def validate_finite(cls, v: float) -> float:
        """All four values must be finite."""
        if not math.isfinite(v):
            raise ValueError("value must be finite")
        return v


class ManifestEntry(BaseModel):
    """One recording file referenced by a manifest."""

    model_config = {"frozen": True, "populate_by_name": True}

    subject_id: str = Field(min_length=1)
    group: Group
    task: Task
    data_path: Path = Field(validation_alias=AliasChoices("path", "data_path"))

    @property
    def key(self) -> tuple[str, Task, str]:
        """Uniqueness key within a manifest."""
        return (self.subject_id, self.task, str(self.data_path))


def first_duplicate(entries: list[ManifestEntry]) -> int | None:
    """1-based position of the first repeated entry key, if any."""
    seen: set[tuple[str, Task, str]] = set()
    for index, entry in enumerate(entries, start=1):
        if entry.key in seen:
            return index
        seen.add(entry.key)
    return None


class Manifest(BaseModel):
    """Validated list of recordings."""

    entries: list[ManifestEntry] = Field(default_factory=list)
    source: Path | None = None

    @model_validator(mode="after")
    def check_unique(self) -> "Manifest":
        """No duplicate (subject_id, task, data_path) triple."""
        index = first_duplicate(self.entries)
        if index is not None:
            raise ValueError(f"duplicate (subject_id, task, data_path) at entry {index}")
        return self

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def subjects(self) -> list[tuple[str, Group]]:
        """Distinct (subject_id, group) pairs in first-seen order."""
        seen: dict[str, Group] = {}
        for entry in self.entries:
            seen.setdefault(entry.subject_id, entry.group)
        return list(seen.items())

    def filter(
        self,
        groups: set[Group] | None = None,
        tasks: set[Task] | None = None,
    ) -> "Manifest":
        """Subset by group and task, preserving order."""
        kept = [
            e
            for e in self.entries
            if (groups is None or e.group in groups) and (tasks is None or e.task in tasks)
        ]
        return Manifest(entries=kept, source=self.source)


@dataclass(frozen=True, eq=False)
class Recording:
    """One task performance by one subject.

    Samples are held column-wise; ``samples()`` yields validated ``PenSample`` rows.
    """

    subject_id: str
    group: Group
    task: Task
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    p: np.ndarray
    sample_rate_hz: float = 250.0
    source: Path | None = None

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def duration_s(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self) else 0.0

    def samples(self) -> list[PenSample]:
        """Row view of the recording."""
        return [
            PenSample(t=float(t), x=float(x), y=float(y), p=float(p))
            for t, x, y, p in zip(self.t, self.x, self.y, self.p)
        ]


CHANNEL_NAMES: tuple[str, ...] = ("x", "y", "p", "vx", "vy", "speed", "traj", "acc")


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Named derived signals sharing one time base."""

    channels: dict[str, np.ndarray]
    dt: float

    def __getitem__(self, name: str) -> np.ndarray:
        return self.channels[name]

    def __contains__(self, name: object) -> bool:
        return name in self.channels

    @property
    def names(self) -> list[str]:
        return list(self.channels)

    @property
    def length(self) -> int:
        lengths = {len(v) for v in self.channels.values()}
        return lengths.pop() if len(lengths) == 1 else -1
