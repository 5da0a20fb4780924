"""The three experiment sweeps: frame windows, channel combinations and tasks."""

from collections.abc import Sequence

from src.errors import ConfigError, DuplicateCombination
from src.harness.dataset import load_spectrograms, make_samples
from src.harness.runner import cross_validate
from src.models.network import ModelKind
from src.models.run import Pipeline, RunConfig
from src.models.spectrogram import WindowSpec
from src.models.telemetry import Manifest, Task, TaskGroup
from src.models.training import EvalReport
from src.state.manager import CacheManager
from src.utils.logging import ExperimentLogger
from src.utils.tracing import RunTracer

DEFAULT_WINDOWS: tuple[str, ...] = ("25ms", "100ms", "500ms", "1s", "1.5s")

CHANNEL_COMBINATIONS: tuple[tuple[str, ...], ...] = (
    ("x", "y", "p"),
    ("traj", "p"),
    ("vx", "vy", "p"),
    ("speed", "p"),
    ("acc", "p"),
    ("traj", "vx", "vy", "p"),
    ("traj", "acc", "p"),
    ("speed", "vx", "vy", "p"),
    ("acc", "vx", "vy", "p"),
    ("speed", "acc", "vx", "vy", "p"),
)


def mark_best(reports: list[EvalReport]) -> list[EvalReport]:
    """Flag the row with the highest pooled F1 (first one on ties)."""
    best_index, best_f1 = None, None
    for index, report in enumerate(reports):
        f1 = report.pooled.f1
        if f1 is not None and (best_f1 is None or f1 > best_f1):
            best_index, best_f1 = index, f1
    return [r.model_copy(update={"best": i == best_index}) for i, r in enumerate(reports)]


def _log_row(run_logger: ExperimentLogger, sweep: str, report: EvalReport) -> None:
    run_logger.log_sweep_row(sweep, report.label, f1=report.pooled.f1, auc=report.pooled.auc)


def sweep_windows(
    manifest: Manifest,
    base: RunConfig,
    windows: Sequence[str | WindowSpec] = DEFAULT_WINDOWS,
    models: Sequence[ModelKind] = (ModelKind.CNN, ModelKind.CNN_BLSTM),
    cache: CacheManager | None = None,
    jobs: int = 1,
    tracer: RunTracer | None = None,
) -> list[EvalReport]:
    """
    One cross-validated row per (model, window), models outermost.

    Spectrograms are computed once; each row re-frames them.

    Raises:
        ConfigError: base configuration is not on the frames pipeline
    """
    if base.pipeline != Pipeline.FRAMES:
        raise ConfigError("the window sweep runs on the frames pipeline")
    specs = [w if isinstance(w, WindowSpec) else WindowSpec.parse(w) for w in windows]
    spectrograms = load_spectrograms(manifest, base, cache, jobs)
    run_logger = ExperimentLogger(base.config_hash()[:12])
    tracer = tracer or RunTracer(run_logger.run_id)

    reports = []
    for model in models:
        for window in specs:
            config = base.evolve(model=model, window=window)
            label = f"{model.value} {window.label}"
            with tracer.trace_operation("sweep_row", "sweep_windows", row=label):
                report = cross_validate(make_samples(spectrograms, config), config, label, jobs)
            _log_row(run_logger, "windows", report)
            reports.append(report)
    return mark_best(reports)


def check_combinations(combinations: Sequence[Sequence[str]]) -> list[tuple[str, ...]]:
    """Reject a channel set requested twice (order-insensitive)."""
    seen: set[frozenset[str]] = set()
    checked = []
    for combination in combinations:
        key = frozenset(combination)
        if key in seen:
            raise DuplicateCombination(f"channel combination {sorted(key)} requested twice")
        seen.add(key)
        checked.append(tuple(combination))
    return checked


def sweep_channels(
    manifest: Manifest,
    base: RunConfig,
    combinations: Sequence[Sequence[str]] = CHANNEL_COMBINATIONS,
    cache: CacheManager | None = None,
    jobs: int = 1,
    tracer: RunTracer | None = None,
) -> list[EvalReport]:
    """
    One row per channel combination on the fixed-size CNN.

    Raises:
        DuplicateCombination, UnknownChannel, ConfigError
    """
    if base.pipeline != Pipeline.FIXED or base.model != ModelKind.CNN:
        raise ConfigError("the channel sweep runs the CNN on the fixed pipeline")
    run_logger = ExperimentLogger(base.config_hash()[:12])
    tracer = tracer or RunTracer(run_logger.run_id)

    reports = []
    for combination in check_combinations(combinations):
        config = base.evolve(channels=list(combination))
        label = "{" + ",".join(combination) + "}"
        with tracer.trace_operation("sweep_row", "sweep_channels", row=label):
            spectrograms = load_spectrograms(manifest, config, cache, jobs)
            report = cross_validate(make_samples(spectrograms, config), config, label, jobs)
        _log_row(run_logger, "channels", report)
        reports.append(report)
    return mark_best(reports)


def task_rows() -> list[str]:
    """Individual tasks grouped under their aggregates, aggregate row last in each group."""
    rows: list[str] = []
    for group in TaskGroup:
        rows.extend(task.value for task in group.tasks)
        rows.append(group.value)
    return rows


def sweep_tasks(
    manifest: Manifest,
    base: RunConfig,
    rows: Sequence[str | Task | TaskGroup] | None = None,
    cache: CacheManager | None = None,
    jobs: int = 1,
    tracer: RunTracer | None = None,
) -> list[EvalReport]:
    """
    One row per task plus one per task group, each trained only on those recordings.

    Raises:
        EmptyTaskSubset: a requested task is absent for the pair
    """
    names = [r.value if isinstance(r, (Task, TaskGroup)) else r for r in (rows or task_rows())]
    spectrograms = load_spectrograms(manifest, base.evolve(task=None), cache, jobs)
    run_logger = ExperimentLogger(base.config_hash()[:12])
    tracer = tracer or RunTracer(run_logger.run_id)

    reports = []
    for name in names:
        config = base.evolve(task=name)
        with tracer.trace_operation("sweep_row", "sweep_tasks", row=name):
            report = cross_validate(make_samples(spectrograms, config), config, name, jobs)
        _log_row(run_logger, "tasks", report)
        reports.append(report)
    return mark_best(reports)
