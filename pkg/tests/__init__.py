"""Test suite for graphocog."""
