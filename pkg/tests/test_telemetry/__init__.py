"""Tests for src.telemetry."""
