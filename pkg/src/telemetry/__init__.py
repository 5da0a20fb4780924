"""Pen telemetry loading and kinematic channels."""

from src.telemetry.channels import derive_channels
from src.telemetry.loader import load_entry, load_manifest, load_recording

__all__ = ["load_manifest", "load_recording", "load_entry", "derive_channels"]
