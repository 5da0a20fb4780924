"""Tests for src.state."""
