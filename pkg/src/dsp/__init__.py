"""Spectrogram computation and framing."""

from src.dsp.framing import fit_fixed_size, frame_decompose
from src.dsp.stft import build_multispectrogram, stft_magnitude
from src.dsp.window import blackman_window

__all__ = [
    "blackman_window",
    "stft_magnitude",
    "build_multispectrogram",
    "fit_fixed_size",
    "frame_decompose",
]
