"""Tests for src.harness."""
