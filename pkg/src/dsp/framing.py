"""Fixed-size fitting and sliding-window frame decomposition."""

import numpy as np

from src.errors import InvalidWindow
from src.models.spectrogram import FrameStack, MultiSpectrogram, WindowMode, WindowSpec


def fit_fixed_size(ms: MultiSpectrogram, target_cols: int = 65) -> MultiSpectrogram:
    """Keep the first ``target_cols`` columns, or zero-pad on the right up to it."""
    n_cols = ms.n_columns
    if n_cols == target_cols:
        return ms
    if n_cols > target_cols:
        values = np.ascontiguousarray(ms.values[:, :, :target_cols])
    else:
        values = np.pad(ms.values, ((0, 0), (0, 0), (0, target_cols - n_cols)), mode="constant")
    return MultiSpectrogram(
        channels=ms.channels, values=values, column_duration_s=ms.column_duration_s
    )


def frame_width(window: WindowSpec | float, mode: WindowMode | str, column_duration_s: float) -> int:
    """Frame width in columns for a window given in columns or milliseconds."""
    if not isinstance(window, WindowSpec):
        if window <= 0:
            raise InvalidWindow(f"window must be positive, got {window}")
        window = WindowSpec(mode=WindowMode(mode), value=float(window))
    return window.columns(column_duration_s)


def frame_decompose(
    ms: MultiSpectrogram,
    window: WindowSpec | float,
    mode: WindowMode | str = WindowMode.COLUMNS,
) -> FrameStack:
    """
    Cut a multi-spectrogram into non-overlapping frames along time.

    Args:
        ms: Source spectrogram (C, F, L)
        window: Frame width, a WindowSpec or a number interpreted in ``mode``
        mode: ``columns`` or ``milliseconds`` when ``window`` is a number

    Returns:
        FrameStack of ceil(L / W) frames of shape (C, F, W); the last one is zero-padded

    Raises:
        InvalidWindow: window <= 0
    """
    width = frame_width(window, mode, ms.column_duration_s)
    c, f, n_cols = ms.shape
    n_frames = -(-n_cols // width)
    pad = n_frames * width - n_cols
    values = ms.values
    if pad:
        values = np.pad(values, ((0, 0), (0, 0), (0, pad)), mode="constant")
    frames = values.reshape(c, f, n_frames, width).transpose(2, 0, 1, 3)
    return FrameStack(
        frames=np.ascontiguousarray(frames),
        stride_cols=width,
        pad_cols_last=pad,
        channels=ms.channels,
    )
