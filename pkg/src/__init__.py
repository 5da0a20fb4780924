"""Handwriting spectrogram analysis for neurodegenerative disease screening."""

__version__ = "0.1.0"
