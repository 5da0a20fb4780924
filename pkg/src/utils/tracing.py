"""Timing traces for pipeline stages."""

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, Generator

from src.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class TraceEvent:
    """Individual timed stage of a run."""

    timestamp: datetime
    event_type: str
    stage: str
    run_id: str
    duration_ms: float | None = None
    metadata: dict[str, Any] = field(default_factory=dict)


class RunTracer:
    """Traces the stages of one run (preprocessing, folds, sweep rows).

    Trace data is only logged; it never enters report files, whose bytes must not depend
    on wall-clock time.
    """

    def __init__(self, run_id: str):
        self.run_id = run_id
        self.events: list[TraceEvent] = []
        self.start_time = time.perf_counter()

    def add_event(
        self,
        event_type: str,
        stage: str,
        duration_ms: float | None = None,
        **metadata: Any,
    ) -> None:
        """Add a trace event."""
        event = TraceEvent(
            timestamp=datetime.now(timezone.utc),
            event_type=event_type,
            stage=stage,
            run_id=self.run_id,
            duration_ms=duration_ms,
            metadata=metadata,
        )
        self.events.append(event)

        logger.debug(
            "trace_event",
            run_id=self.run_id,
            event_type=event_type,
            stage=stage,
            duration_ms=duration_ms,
            **metadata,
        )

    @contextmanager
    def trace_operation(
        self, operation: str, stage: str, **metadata: Any
    ) -> Generator[None, None, None]:
        """Context manager to trace an operation with timing."""
        start = time.perf_counter()
        try:
            yield
        finally:
            duration_ms = (time.perf_counter() - start) * 1000
            self.add_event(operation, stage, duration_ms=duration_ms, **metadata)

    def get_trace_summary(self) -> dict[str, Any]:
        """Get a summary of the trace."""
        total_duration = (time.perf_counter() - self.start_time) * 1000

        stage_stats: dict[str, dict[str, Any]] = {}
        for event in self.events:
            stats = stage_stats.setdefault(
                event.stage, {"event_count": 0, "total_duration_ms": 0.0}
            )
            stats["event_count"] += 1
            if event.duration_ms:
                stats["total_duration_ms"] += event.duration_ms

        return {
            "run_id": self.run_id,
            "total_duration_ms": total_duration,
            "total_events": len(self.events),
            "stage_stats": stage_stats,
        }
