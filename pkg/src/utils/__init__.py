"""Utility modules."""

from src.utils.logging import ExperimentLogger, get_logger, setup_logging
from src.utils.tracing import RunTracer

__all__ = ["setup_logging", "get_logger", "ExperimentLogger", "RunTracer"]
