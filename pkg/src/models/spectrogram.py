"""Spectrogram data models."""

import math
import re
from dataclasses import dataclass
from enum import Enum

import numpy as np
from pydantic import BaseModel, Field, model_validator

from src.errors import InvalidWindow


class StftConfig(BaseModel):
    """Short-time Fourier transform settings."""

    model_config = {"frozen": True}

    window_len: int = Field(default=256, ge=2)
    hop: int = Field(default=128, ge=1)
    n_fft: int = Field(default=256, ge=2)
    sample_rate_hz: float = Field(default=250.0, gt=0)
    center_pad: bool = True
    log_scale: bool = False

    @model_validator(mode="after")
    def check_lengths(self) -> "StftConfig":
        """hop <= window_len <= n_fft, n_fft even."""
        if not self.hop <= self.window_len <= self.n_fft:
            raise ValueError("require hop <= window_len <= n_fft")
        if self.n_fft % 2:
            raise ValueError("n_fft must be even")
        return self

    @property
    def n_bins(self) -> int:
        return self.n_fft // 2 + 1

    @property
    def column_duration_s(self) -> float:
        return self.hop / self.sample_rate_hz

    def n_columns(self, n_samples: int) -> int:
        """Number of STFT columns for a signal of ``n_samples``."""
        if self.center_pad:
            return 1 + n_samples // self.hop
        return max(0, 1 + (n_samples - self.window_len) // self.hop)


class WindowMode(str, Enum):
    """Unit of a frame window."""

    COLUMNS = "columns"
    MILLISECONDS = "milliseconds"


_WINDOW_RE = re.compile(r"^\s*(?:(cols?):\s*(\d+)|([0-9]*\.?[0-9]+)\s*(ms|s))\s*$")


class WindowSpec(BaseModel):
    """Frame width, either in spectrogram columns or in milliseconds."""

    model_config = {"frozen": True}

    mode: WindowMode
    value: float

    @classmethod
    def parse(cls, text: str) -> "WindowSpec":
        """Parse ``1s``, ``1.5s``, ``500ms`` or ``cols:2``."""
        match = _WINDOW_RE.match(text)
        if match is None:
            raise InvalidWindow(f"cannot parse window {text!r}")
        if match.group(1):
            return cls(mode=WindowMode.COLUMNS, value=float(match.group(2)))
        amount = float(match.group(3))
        if match.group(4) == "s":
            amount *= 1000.0
        return cls(mode=WindowMode.MILLISECONDS, value=amount)

    def columns(self, column_duration_s: float) -> int:
        """Frame width in columns (nearest, at least one)."""
        if self.value <= 0:
            raise InvalidWindow(f"window must be positive, got {self.label}")
        if self.mode == WindowMode.COLUMNS:
            if self.value != int(self.value):
                raise InvalidWindow(f"column window must be an integer, got {self.value}")
            return int(self.value)
        ratio = (self.value / 1000.0) / column_duration_s
        return max(1, int(math.floor(ratio + 0.5)))

    @property
    def label(self) -> str:
        if self.mode == WindowMode.COLUMNS:
            return f"cols:{int(self.value)}"
        if self.value >= 1000 and self.value % 100 == 0:
            return f"{self.value / 1000:g}s"
        return f"{self.value:g}ms"


@dataclass(frozen=True, eq=False)
class Spectrogram:
    """Single-channel magnitude spectrogram (F x L)."""

    values: np.ndarray
    column_duration_s: float

    @property
    def n_bins(self) -> int:
        return int(self.values.shape[0])

    @property
    def n_columns(self) -> int:
        return int(self.values.shape[1])


@dataclass(frozen=True, eq=False)
class MultiSpectrogram:
    """Stacked channel spectrograms (C x F x L), float32 storage."""

    channels: tuple[str, ...]
    values: np.ndarray
    column_duration_s: float = 0.512

    def __post_init__(self) -> None:
        if self.values.ndim != 3 or self.values.shape[0] != len(self.channels):
            raise ValueError(
                f"values shape {self.values.shape} does not match {len(self.channels)} channels"
            )

    @property
    def shape(self) -> tuple[int, int, int]:
        c, f, n = self.values.shape
        return int(c), int(f), int(n)

    @property
    def n_columns(self) -> int:
        return int(self.values.shape[2])

    def describe(self) -> str:
        return "×".join(str(d) for d in self.shape)


@dataclass(frozen=True, eq=False)
class FrameStack:
    """Non-overlapping equal-width frames cut from a multi-spectrogram."""

    frames: np.ndarray  # (n_frames, C, F, W)
    stride_cols: int
    pad_cols_last: int
    channels: tuple[str, ...] = ()

    def __len__(self) -> int:
        return int(self.frames.shape[0])

    @property
    def width(self) -> int:
        return int(self.frames.shape[3])

    def reassemble(self) -> np.ndarray:
        """Concatenate frames along time and drop the trailing padding."""
        n, c, f, w = self.frames.shape
        joined = self.frames.transpose(1, 2, 0, 3).reshape(c, f, n * w)
        return joined[:, :, : n * w - self.pad_cols_last]
