"""Taper windows."""

import numpy as np
from scipy.signal import windows

from src.errors import InvalidLength


def blackman_window(length: int) -> np.ndarray:
    """
    Symmetric Blackman window (0.42, 0.5, 0.08 coefficients).

    Args:
        length: Number of samples, at least 2

    Returns:
        float64 window with w[k] == w[length - 1 - k] exactly

    Raises:
        InvalidLength: length below 2
    """
    if length < 2:
        raise InvalidLength(f"window length must be >= 2, got {length}")
    w = windows.blackman(length, sym=True).astype(np.float64)
    # averaging with the mirror image makes symmetry bit-exact
    return 0.5 * (w + w[::-1])
