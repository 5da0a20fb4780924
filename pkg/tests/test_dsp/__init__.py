"""Tests for src.dsp."""
