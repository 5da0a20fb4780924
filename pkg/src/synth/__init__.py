"""Synthetic cohorts and separability checks."""

from src.synth.generator import generate_cohort, synthesize_recording
from src.synth.probe import ProbeResult, separability_probe

__all__ = ["generate_cohort", "synthesize_recording", "separability_probe", "ProbeResult"]
