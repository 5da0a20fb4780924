"""Tests for src.synth."""
