"""Tests for the Blackman window, STFT magnitude and multi-channel stacking."""

import numpy as np
import pytest

from src.dsp.stft import build_multispectrogram, normalize_channels, stft_magnitude
from src.dsp.window import blackman_window
from src.errors import EmptySignal, InvalidChannelSelection, InvalidLength, UnknownChannel
from src.models.spectrogram import StftConfig
from src.models.telemetry import ChannelSet
from src.telemetry.channels import derive_channels
from tests.factories import make_recording


def naive_dft_magnitude(segment: np.ndarray, n_fft: int) -> np.ndarray:
    """|X_k| for k = 0..n_fft/2 by the O(N^2) definition."""
    n = np.arange(segment.size)
    return np.array(
        [
            abs(np.sum(segment * np.exp(-2j * np.pi * k * n / n_fft)))
            for k in range(n_fft // 2 + 1)
        ]
    )


def naive_stft(signal: np.ndarray, cfg: StftConfig) -> np.ndarray:
    half = cfg.window_len // 2
    padded = np.concatenate([np.zeros(half), signal, np.zeros(cfg.window_len - half)])
    k = np.arange(cfg.window_len)
    window = 0.42 - 0.5 * np.cos(2 * np.pi * k / (cfg.window_len - 1)) + 0.08 * np.cos(
        4 * np.pi * k / (cfg.window_len - 1)
    )
    columns = 1 + signal.size // cfg.hop
    return np.stack(
        [
            naive_dft_magnitude(padded[c * cfg.hop : c * cfg.hop + cfg.window_len] * window, cfg.n_fft)
            for c in range(columns)
        ],
        axis=1,
    )


def test_blackman_three_points() -> None:
    np.testing.assert_allclose(blackman_window(3), [0.0, 1.0, 0.0], atol=1.4e-16)


@pytest.mark.parametrize("length", [2, 5, 64, 256, 257])
def test_blackman_exact_symmetry(length: int) -> None:
    w = blackman_window(length)
    assert np.array_equal(w, w[::-1])
    assert abs(w[0]) <= 1.4e-16


def test_blackman_256_sum() -> None:
    """Cosine terms over one full period plus the endpoint sum to 1 each: 0.42 * 255."""
    assert blackman_window(256).sum() == pytest.approx(107.1, abs=1e-10)


def test_blackman_too_short() -> None:
    with pytest.raises(InvalidLength):
        blackman_window(1)


def test_column_count_law() -> None:
    """L = 1 + N // 128 for every N in [1, 10000]."""
    cfg = StftConfig()
    signal = np.ones(10000)
    for n in range(1, 10001):
        assert stft_magnitude(signal[:n], cfg).n_columns == 1 + n // 128, n


def test_33_seconds_give_65_columns() -> None:
    spectrogram = stft_magnitude(np.random.default_rng(0).normal(size=8250))
    assert spectrogram.values.shape == (129, 65)
    assert spectrogram.column_duration_s == pytest.approx(0.512)


def test_zero_signal() -> None:
    assert not stft_magnitude(np.zeros(500)).values.any()


def test_empty_signal() -> None:
    with pytest.raises(EmptySignal):
        stft_magnitude(np.array([]))


def test_sinusoid_peaks_at_bin_32() -> None:
    """31.25 Hz sits exactly on bin 32 of a 256-point transform at 250 Hz."""
    n = 2048
    signal = np.sin(2 * np.pi * 31.25 * np.arange(n) / 250.0)
    values = stft_magnitude(signal).values
    interior = values[:, 2:-2]
    assert np.all(interior.argmax(axis=0) == 32)
    np.testing.assert_allclose(values, naive_stft(signal, StftConfig()), rtol=1e-6, atol=1e-9)


def test_matches_naive_dft_on_random_signals() -> None:
    rng = np.random.default_rng(42)
    cfg = StftConfig()
    lengths = [2048, *rng.integers(1, 2049, size=19)]
    for n in lengths:
        signal = rng.normal(size=int(n))
        np.testing.assert_allclose(
            stft_magnitude(signal, cfg).values, naive_stft(signal, cfg), rtol=1e-6, atol=1e-9
        )


def test_energy_identity_at_one_column(rng: np.random.Generator) -> None:
    """sum |X_k|^2 over the full spectrum equals n_fft * sum (w * seg)^2."""
    cfg = StftConfig()
    signal = rng.normal(size=1024)
    values = stft_magnitude(signal, cfg).values
    column = 4
    segment = signal[column * cfg.hop - cfg.window_len // 2 : column * cfg.hop + cfg.window_len // 2]
    windowed = segment * blackman_window(cfg.window_len)
    one_sided = values[:, column] ** 2
    full = one_sided[0] + one_sided[-1] + 2 * one_sided[1:-1].sum()
    assert full == pytest.approx(cfg.n_fft * np.sum(windowed**2), rel=1e-6)


def test_scaling_is_linear(rng: np.random.Generator) -> None:
    signal = rng.normal(size=600)
    np.testing.assert_allclose(
        stft_magnitude(2.5 * signal).values, 2.5 * stft_magnitude(signal).values, rtol=1e-12
    )


def test_log_scale() -> None:
    signal = np.random.default_rng(3).normal(size=400)
    plain = stft_magnitude(signal).values
    logged = stft_magnitude(signal, StftConfig(log_scale=True)).values
    np.testing.assert_allclose(logged, np.log1p(plain))


def test_stft_config_rejects_bad_lengths() -> None:
    with pytest.raises(ValueError):
        StftConfig(window_len=256, hop=300)
    with pytest.raises(ValueError):
        StftConfig(window_len=255, n_fft=255)


def _channels(n: int = 2000) -> ChannelSet:
    rng = np.random.default_rng(9)
    return derive_channels(
        make_recording(rng.normal(size=n).cumsum(), rng.normal(size=n).cumsum(), rng.uniform(0, 1, n))
    )


def test_default_four_channel_stack() -> None:
    ms = build_multispectrogram(_channels(), ["speed", "vx", "vy", "p"])
    assert ms.shape == (4, 129, 1 + 1999 // 128)
    assert ms.values.dtype == np.float32
    assert ms.channels == ("speed", "vx", "vy", "p")


def test_channel_order_follows_selection() -> None:
    channels = _channels()
    forward = build_multispectrogram(channels, ["traj", "p"])
    backward = build_multispectrogram(channels, ["p", "traj"])
    np.testing.assert_array_equal(forward.values[0], backward.values[1])


def test_unknown_channel() -> None:
    with pytest.raises(UnknownChannel):
        build_multispectrogram(_channels(), ["vx", "foo"])


@pytest.mark.parametrize("selection", [["vx"], ["vx", "vx"], ["x", "y", "p", "vx", "vy", "speed"]])
def test_invalid_selection_size(selection: list[str]) -> None:
    with pytest.raises(InvalidChannelSelection):
        build_multispectrogram(_channels(), selection)


def test_normalize_channels() -> None:
    ms = normalize_channels(build_multispectrogram(_channels(), ["vx", "p"]))
    values = ms.values.astype(np.float64)
    np.testing.assert_allclose(values.mean(axis=(1, 2)), 0.0, atol=1e-5)
    np.testing.assert_allclose(values.std(axis=(1, 2)), 1.0, atol=1e-4)
