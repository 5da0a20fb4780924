"""Tests for src.micronet."""
