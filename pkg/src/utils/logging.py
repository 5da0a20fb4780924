"""Structured logging configuration."""

import logging
import sys
from typing import Any

import structlog
from pythonjsonlogger import jsonlogger

from src.config import get_settings


def setup_logging(level: str | None = None) -> None:
    """Configure structured logging for the pipeline.

    Logs are written to standard error so result tables on standard output stay clean.
    """
    settings = get_settings()

    # Configure standard library logging
    log_level = getattr(logging, (level or settings.log_level).upper())

    handler = logging.StreamHandler(sys.stderr)
    if settings.log_format == "json":
        formatter: logging.Formatter = jsonlogger.JsonFormatter(
            fmt="%(asctime)s %(levelname)s %(name)s %(message)s",
            rename_fields={"levelname": "level", "asctime": "timestamp"},
        )
    else:
        formatter = logging.Formatter(
            fmt="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            datefmt="%Y-%m-%d %H:%M:%S",
        )
    handler.setFormatter(formatter)

    # Configure root logger
    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers.clear()
    root_logger.addHandler(handler)

    # Configure structlog
    structlog.configure(
        processors=[
            structlog.contextvars.merge_contextvars,
            structlog.processors.add_log_level,
            structlog.processors.StackInfoRenderer(),
            structlog.dev.set_exc_info,
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.processors.JSONRenderer() if settings.log_format == "json"
            else structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.make_filtering_bound_logger(log_level),
        context_class=dict,
        logger_factory=structlog.PrintLoggerFactory(file=sys.stderr),
        cache_logger_on_first_use=False,
    )


def get_logger(name: str) -> structlog.BoundLogger:
    """Get a structured logger instance."""
    return structlog.get_logger(name)


class ExperimentLogger:
    """Specialized logger for training runs and sweeps."""

    def __init__(self, run_id: str):
        self.run_id = run_id
        self.logger = get_logger(f"run.{run_id}")

    def log_epoch(
        self,
        fold: int,
        epoch: int,
        train_loss: float,
        val_loss: float,
        lr: float,
        **kwargs: Any,
    ) -> None:
        """Log one finished training epoch."""
        self.logger.debug(
            "epoch_finished",
            run_id=self.run_id,
            fold=fold,
            epoch=epoch,
            train_loss=round(train_loss, 6),
            val_loss=round(val_loss, 6),
            lr=lr,
            **kwargs,
        )

    def log_scheduler(self, fold: int, epoch: int, old_lr: float, new_lr: float) -> None:
        """Log a learning-rate reduction."""
        self.logger.info(
            "lr_reduced",
            run_id=self.run_id,
            fold=fold,
            epoch=epoch,
            old_lr=old_lr,
            new_lr=new_lr,
        )

    def log_fold(
        self,
        fold: int,
        duration_ms: float | None = None,
        **metrics: Any,
    ) -> None:
        """Log a finished cross-validation fold."""
        log_data: dict[str, Any] = {"run_id": self.run_id, "fold": fold}
        if duration_ms is not None:
            log_data["duration_ms"] = round(duration_ms, 1)
        log_data.update(metrics)
        self.logger.info("fold_finished", **log_data)

    def log_sweep_row(self, sweep: str, row: str, **metrics: Any) -> None:
        """Log a finished sweep row."""
        self.logger.info("sweep_row_finished", run_id=self.run_id, sweep=sweep, row=row, **metrics)
