"""Cross-validation, training, metrics and experiment sweeps."""

from src.harness.dataset import Sample, load_samples, load_spectrograms, make_samples
from src.harness.folds import make_folds
from src.harness.metrics import auc_rank, compute_metrics
from src.harness.reporting import format_table, write_reports
from src.harness.runner import cross_validate, evaluate
from src.harness.sweeps import sweep_channels, sweep_tasks, sweep_windows
from src.harness.trainer import EarlyStopping, PlateauScheduler, train_model

__all__ = [
    "Sample",
    "load_samples",
    "load_spectrograms",
    "make_samples",
    "make_folds",
    "auc_rank",
    "compute_metrics",
    "format_table",
    "write_reports",
    "cross_validate",
    "evaluate",
    "sweep_windows",
    "sweep_channels",
    "sweep_tasks",
    "train_model",
    "PlateauScheduler",
    "EarlyStopping",
]
