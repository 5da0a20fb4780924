"""STFT magnitude spectrograms and multi-channel stacking."""

from functools import lru_cache

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.dsp.window import blackman_window
from src.errors import EmptySignal, InvalidChannelSelection, LengthMismatch, UnknownChannel
from src.models.spectrogram import MultiSpectrogram, Spectrogram, StftConfig
from src.models.telemetry import ChannelSet


@lru_cache(maxsize=8)
def _window(length: int) -> np.ndarray:
    w = blackman_window(length)
    w.flags.writeable = False
    return w


def stft_magnitude(signal: np.ndarray, cfg: StftConfig | None = None) -> Spectrogram:
    """
    Magnitude STFT of a real signal.

    With centre padding the signal gets ``window_len // 2`` zeros on both ends, giving
    ``1 + N // hop`` columns.

    Args:
        signal: 1-D real sequence, at least one sample
        cfg: STFT settings (defaults: Blackman 256, hop 128, n_fft 256)

    Returns:
        Spectrogram of shape (n_fft // 2 + 1, L), float64

    Raises:
        EmptySignal: zero-length input
    """
    cfg = cfg or StftConfig()
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.shape[0] == 0:
        raise EmptySignal("cannot transform an empty signal")
    n_samples = x.shape[0]

    if cfg.center_pad:
        half = cfg.window_len // 2
        x = np.pad(x, (half, cfg.window_len - half), mode="constant")
    elif x.shape[0] < cfg.window_len:
        x = np.pad(x, (0, cfg.window_len - x.shape[0]), mode="constant")

    segments = sliding_window_view(x, cfg.window_len)[:: cfg.hop]
    n_columns = cfg.n_columns(n_samples) if cfg.center_pad else segments.shape[0]
    segments = segments[:n_columns]

    spectrum = np.fft.rfft(segments * _window(cfg.window_len), n=cfg.n_fft, axis=1)
    magnitude = np.abs(spectrum).T
    if cfg.log_scale:
        magnitude = np.log1p(magnitude)
    return Spectrogram(values=np.ascontiguousarray(magnitude), column_duration_s=cfg.column_duration_s)


def build_multispectrogram(
    channels: ChannelSet,
    selection: list[str] | tuple[str, ...],
    cfg: StftConfig | None = None,
) -> MultiSpectrogram:
    """
    Stack per-channel spectrograms in selection order.

    Args:
        channels: Derived channel set
        selection: Ordered channel names (2 to 5)
        cfg: STFT settings

    Returns:
        MultiSpectrogram of shape (C, F, L), float32

    Raises:
        UnknownChannel, LengthMismatch, InvalidChannelSelection
    """
    cfg = cfg or StftConfig()
    selection = tuple(selection)
    if len(set(selection)) != len(selection):
        raise InvalidChannelSelection(f"channel selection repeats a channel: {selection}")
    if not 2 <= len(selection) <= 5:
        raise InvalidChannelSelection(f"select 2 to 5 channels, got {len(selection)}")
    missing = [name for name in selection if name not in channels]
    if missing:
        raise UnknownChannel(f"unknown channel(s) {missing}; available: {channels.names}")
    lengths = {len(channels[name]) for name in selection}
    if len(lengths) != 1:
        raise LengthMismatch(f"selected channels differ in length: {sorted(lengths)}")

    planes = [stft_magnitude(channels[name], cfg).values for name in selection]
    values = np.stack(planes, axis=0).astype(np.float32)
    return MultiSpectrogram(
        channels=selection, values=values, column_duration_s=cfg.column_duration_s
    )


def normalize_channels(ms: MultiSpectrogram) -> MultiSpectrogram:
    """Per-channel z-score (zero mean, unit variance; constant planes map to zero)."""
    values = ms.values.astype(np.float64)
    mean = values.mean(axis=(1, 2), keepdims=True)
    std = values.std(axis=(1, 2), keepdims=True)
    std[std == 0] = 1.0
    return MultiSpectrogram(
        channels=ms.channels,
        values=((values - mean) / std).astype(np.float32),
        column_duration_s=ms.column_duration_s,
    )
