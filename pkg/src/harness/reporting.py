"""Report files (JSON lines) and the aligned result table."""

from collections.abc import Sequence
from pathlib import Path
from typing import Any

import orjson
import pandas as pd

from src.models.run import RunConfig
from src.models.training import EvalReport
from src.state.container import write_bytes
from src.utils.logging import get_logger

logger = get_logger(__name__)

TABLE_COLUMNS = ("accuracy", "f1", "auc", "precision", "recall")


def report_record(report: EvalReport) -> dict[str, Any]:
    """JSON-ready record of one report row."""
    return report.model_dump(mode="json")


def encode_reports(reports: Sequence[EvalReport]) -> bytes:
    """One sorted-key JSON object per line, no timestamps."""
    lines = [orjson.dumps(report_record(r), option=orjson.OPT_SORT_KEYS) for r in reports]
    return b"\n".join(lines) + b"\n"


def report_path(out_dir: Path, kind: str, config: RunConfig) -> Path:
    return Path(out_dir) / f"{kind}_{config.pair.value}_{config.config_hash()[:12]}.jsonl"


def write_reports(path: Path, reports: Sequence[EvalReport]) -> Path:
    """Write the report file; the same reports always give the same bytes."""
    write_bytes(Path(path), encode_reports(reports))
    logger.info("report_written", path=str(path), rows=len(reports))
    return Path(path)


def load_reports(path: Path) -> list[EvalReport]:
    return [
        EvalReport.model_validate(orjson.loads(line))
        for line in Path(path).read_bytes().splitlines()
        if line.strip()
    ]


def report_frame(reports: Sequence[EvalReport]) -> pd.DataFrame:
    """Pooled metrics per row, best row marked."""
    rows = []
    for report in reports:
        row: dict[str, Any] = {"row": report.label}
        for column in TABLE_COLUMNS:
            row[column] = getattr(report.pooled, column)
        row["n"] = report.pooled.n_samples
        row["best"] = "*" if report.best else ""
        rows.append(row)
    return pd.DataFrame(rows, columns=["row", *TABLE_COLUMNS, "n", "best"])


def format_table(reports: Sequence[EvalReport]) -> str:
    """Aligned text table, percentages with two decimals; undefined metrics as ``n/a``."""
    frame = report_frame(reports)
    for column in TABLE_COLUMNS:
        frame[column] = frame[column].map(lambda v: "n/a" if v is None or pd.isna(v) else f"{v:.2f}")
    return frame.to_string(index=False, justify="right")
