"""Persistent artifacts: spectrogram cache and weight files."""

from src.state.manager import CacheManager

__all__ = ["CacheManager"]
