"""Command-line entry point (``graphocog``)."""

import functools
import hashlib
from collections import Counter
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
import pandas as pd
from pydantic import ValidationError

from src import __version__
from src.config import get_settings
from src.errors import ConfigError, GraphocogError
from src.harness.dataset import load_samples, preprocess_manifest, to_frames
from src.harness.reporting import format_table, report_path, write_reports
from src.harness.runner import cross_validate
from src.harness.sweeps import DEFAULT_WINDOWS, sweep_channels, sweep_tasks, sweep_windows
from src.models.cohort import CohortSpec
from src.models.network import ModelKind
from src.models.run import Pipeline, RunConfig, load_config_file
from src.models.telemetry import Group, Task
from src.models.training import DEFAULT_CHANNELS, EvalReport, ExperimentPair
from src.state.manager import CacheManager
from src.synth.generator import generate_cohort
from src.synth.probe import separability_probe
from src.telemetry.loader import cohort_summary, load_manifest
from src.utils.logging import get_logger, setup_logging
from src.utils.tracing import RunTracer

logger = get_logger(__name__)


def handle_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Map pipeline errors to their documented exit codes."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except GraphocogError as exc:
            logger.error("command_failed", error_type=type(exc).__name__, exit_code=exc.exit_code)
            click.echo(f"error: {exc}", err=True)
            raise SystemExit(exc.exit_code) from exc

    return wrapper


def run_options(command: Callable[..., Any]) -> Callable[..., Any]:
    """Flags shared by ``run`` and the sweeps; each overrides the config-file key."""
    options = [
        click.option("--config", "config_path", type=click.Path(path_type=Path), help="JSON config file with dotted keys."),
        click.option("--manifest", type=click.Path(path_type=Path), help="Cohort manifest (JSON lines)."),
        click.option("--pair", type=click.Choice([p.value for p in ExperimentPair]), help="Experiment pair."),
        click.option("--pipeline", type=click.Choice([p.value for p in Pipeline]), help="Spectrogram pipeline."),
        click.option("--channels", help="Comma-separated channels, or 'best' for the pair preset."),
        click.option("--window", help="Frame window, e.g. 1s, 500ms or cols:2."),
        click.option("--task", help="Task or task-group filter."),
        click.option("--seed", type=int, help="Master seed."),
        click.option("--folds", type=int, help="Number of cross-validation folds."),
        click.option("--jobs", type=int, help="Parallel folds (default: folds capped at CPU count)."),
        click.option("--out", "out_dir", type=click.Path(path_type=Path), help="Report directory."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


# Run-config keys the process environment can supply, with their settings names.
ENV_PATHS = {"cache_dir": "cache_dir", "out_dir": "output_dir"}


def build_config(config_path: Path | None, **flags: Any) -> RunConfig:
    """Merge sources for one run: flags, then environment, then config file, then defaults."""
    settings = get_settings()
    overrides = {key: value for key, value in flags.items() if value is not None}
    config = RunConfig.from_sources(config_path, overrides)
    changes: dict[str, Any] = {}
    for key, setting in ENV_PATHS.items():
        if key in overrides:
            continue
        if setting in settings.model_fields_set or getattr(config, key) is None:
            changes[key] = getattr(settings, setting)
    return config.evolve(**changes) if changes else config


def resolve_jobs(config: RunConfig, jobs: int | None) -> int:
    return jobs if jobs is not None else max(1, min(config.folds, get_settings().max_jobs))


def emit(kind: str, config: RunConfig, reports: list[EvalReport]) -> None:
    assert config.out_dir is not None
    path = write_reports(report_path(config.out_dir, kind, config), reports)
    click.echo(format_table(reports))
    click.echo(f"config_hash: {config.config_hash()}  seed: {config.seed}  version: {__version__}")
    click.echo(f"report: {path}")


def load_cohort(config: RunConfig) -> tuple[Any, CacheManager]:
    if config.manifest is None:
        raise ConfigError("no manifest given (use --manifest or the 'manifest' config key)")
    return load_manifest(config.manifest), CacheManager(config.cache_dir)


@click.group()
@click.option("--log-level", default=None, help="Override GRAPHOCOG_LOG_LEVEL.")
@click.version_option(__version__, prog_name="graphocog")
def cli(log_level: str | None) -> None:
    """Spectrogram-based handwriting classification experiments."""
    setup_logging(log_level)


@cli.command()
@click.option("--out", "out_dir", type=click.Path(path_type=Path), default=Path("cohort"), show_default=True)
@click.option("--seed", type=int, default=None, help="Cohort seed (default: GRAPHOCOG_DEFAULT_SEED).")
@click.option("--amplitude", type=float, default=1.0, show_default=True, help="Signature scale; 0 makes groups identical.")
@click.option("--counts", default=None, help="Subjects per group, e.g. CTL=42,PD=35,PDM=15,AD=21.")
@click.option("--tasks", default=None, help="Comma-separated task names (default: all 14).")
@click.option("--duration", default="10,60", show_default=True, help="Min,max recording length in seconds.")
@click.option("--jobs", type=int, default=1, show_default=True)
@handle_errors
def synth(
    out_dir: Path,
    seed: int | None,
    amplitude: float,
    counts: str | None,
    tasks: str | None,
    duration: str,
    jobs: int,
) -> None:
    """Generate a synthetic cohort and its manifest."""
    data: dict[str, Any] = {
        "seed": seed if seed is not None else get_settings().default_seed,
        "amplitude": amplitude,
    }
    try:
        if counts:
            data["group_counts"] = {
                Group(name.strip()): int(value)
                for name, value in (part.split("=") for part in counts.split(","))
            }
        if tasks:
            data["tasks"] = [Task(name.strip()) for name in tasks.split(",")]
        low, high = (float(v) for v in duration.split(","))
        data["duration_s"] = (low, high)
        spec = CohortSpec.model_validate(data)
    except (ValueError, ValidationError) as exc:
        raise ConfigError(f"invalid cohort settings: {exc}") from exc

    manifest = generate_cohort(spec, out_dir, jobs=jobs)
    assert manifest.source is not None
    digest = hashlib.sha256(manifest.source.read_bytes()).hexdigest()
    click.echo(f"manifest: {manifest.source}")
    click.echo(f"subjects: {spec.n_subjects}  files: {len(manifest)}")
    click.echo(f"manifest_sha256: {digest}")


@cli.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), help="JSON config file with dotted keys.")
@click.option("--manifest", type=click.Path(path_type=Path), help="Cohort manifest (JSON lines).")
@click.option("--channels", default=None, help=f"Comma-separated channels or 'best' [default: {','.join(DEFAULT_CHANNELS)}].")
@click.option("--pair", type=click.Choice([p.value for p in ExperimentPair]), default=None, help="Only used to resolve --channels best.")
@click.option("--pipeline", type=click.Choice([p.value for p in Pipeline]), default=None, help="Spectrogram pipeline [default: fixed].")
@click.option("--window", default=None, help="Frame window for the frames pipeline [default: 1s].")
@click.option("--jobs", type=int, default=1, show_default=True)
@handle_errors
def preprocess(config_path: Path | None, jobs: int, window: str | None, **flags: Any) -> None:
    """Validate recordings, fill the spectrogram cache and summarise shapes."""
    file_data = load_config_file(config_path) if config_path is not None else {}
    pipeline = flags["pipeline"] or file_data.get("pipeline")
    if pipeline == Pipeline.FRAMES.value and window is None and "window" not in file_data:
        window = "1s"
    config = build_config(config_path, window=window, **flags)
    cohort, cache = load_cohort(config)
    selection = list(config.channels)
    tracer = RunTracer(config.config_hash()[:12])
    with tracer.trace_operation("preprocess", "preprocess", files=len(cohort)):
        done = preprocess_manifest(cohort, selection, config.stft, cache, jobs)

    shapes: Counter[str] = Counter()
    for item in done:
        frames = to_frames(item.spectrogram, config)
        frame_shape = "×".join(str(d) for d in frames.shape[1:])
        shape = frame_shape if config.pipeline == Pipeline.FIXED else f"{frames.shape[0]} frames of {frame_shape}"
        logger.debug("spectrogram_ready", path=str(item.entry.data_path), shape=shape)
        shapes[shape] += 1

    summary = cohort_summary([d.entry for d in done], [d.duration_s for d in done])
    logger.info("cohort_summary", summary=summary.to_dict(orient="index"), cache_hits=cache.hits)
    logger.info("preprocess_timing", **tracer.get_trace_summary())
    table = pd.DataFrame(sorted(shapes.items()), columns=["shape", "files"])
    click.echo(table.to_string(index=False))
    click.echo(f"cache: {cache.cache_dir}")


@cli.command()
@run_options
@click.option("--model", type=click.Choice([m.value for m in ModelKind]), help="Classifier.")
@handle_errors
def run(config_path: Path | None, jobs: int | None, **flags: Any) -> None:
    """Cross-validate one configuration."""
    config = build_config(config_path, **flags)
    manifest, cache = load_cohort(config)
    jobs = resolve_jobs(config, jobs)
    samples = load_samples(manifest, config, cache, jobs)
    report = cross_validate(samples, config, jobs=jobs)
    emit("run", config, [report])


@cli.command("sweep-windows")
@run_options
@click.option("--model", type=click.Choice([m.value for m in ModelKind]), help="Only this model (default: both).")
@click.option("--windows", default=",".join(DEFAULT_WINDOWS), show_default=True, help="Comma-separated windows.")
@handle_errors
def sweep_windows_cmd(
    config_path: Path | None, jobs: int | None, windows: str, **flags: Any
) -> None:
    """One row per (model, frame window) on the frames pipeline."""
    window_list = [w.strip() for w in windows.split(",") if w.strip()]
    if flags.get("window"):
        window_list = [flags["window"]]
    model = flags.pop("model", None)
    flags["pipeline"] = flags.get("pipeline") or Pipeline.FRAMES.value
    flags["window"] = window_list[0] if window_list else None
    if model is not None:
        flags["model"] = model
    config = build_config(config_path, **flags)
    models = [ModelKind(model)] if model else [ModelKind.CNN, ModelKind.CNN_BLSTM]
    manifest, cache = load_cohort(config)
    jobs = resolve_jobs(config, jobs)
    reports = sweep_windows(manifest, config, window_list, models, cache, jobs)
    emit("sweep-windows", config, reports)


@cli.command("sweep-channels")
@run_options
@click.option("--combinations", default=None, help="Semicolon-separated channel sets, e.g. 'x,y,p;traj,p'.")
@handle_errors
def sweep_channels_cmd(
    config_path: Path | None, jobs: int | None, combinations: str | None, **flags: Any
) -> None:
    """One row per channel combination on the fixed-size CNN."""
    config = build_config(config_path, **flags)
    manifest, cache = load_cohort(config)
    jobs = resolve_jobs(config, jobs)
    kwargs: dict[str, Any] = {}
    if combinations:
        kwargs["combinations"] = [
            [c.strip() for c in part.split(",") if c.strip()]
            for part in combinations.split(";")
            if part.strip()
        ]
    reports = sweep_channels(manifest, config, cache=cache, jobs=jobs, **kwargs)
    emit("sweep-channels", config, reports)


@cli.command("sweep-tasks")
@run_options
@click.option("--tasks", "task_rows", default=None, help="Comma-separated tasks/groups (default: 14 tasks + 4 groups).")
@handle_errors
def sweep_tasks_cmd(
    config_path: Path | None, jobs: int | None, task_rows: str | None, **flags: Any
) -> None:
    """One row per task and per task group, using the pair's preferred channels."""
    flags["channels"] = flags.get("channels") or "best"
    config = build_config(config_path, **flags)
    manifest, cache = load_cohort(config)
    jobs = resolve_jobs(config, jobs)
    rows = [r.strip() for r in task_rows.split(",")] if task_rows else None
    reports = sweep_tasks(manifest, config, rows, cache, jobs)
    emit("sweep-tasks", config, reports)


@cli.command()
@click.option("--manifest", type=click.Path(path_type=Path), required=True)
@click.option("--pair", type=click.Choice([p.value for p in ExperimentPair]), default=ExperimentPair.PD_CTL.value, show_default=True)
@click.option("--permutations", type=int, default=200, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--level", type=click.FloatRange(0.5, 1.0, max_open=True), default=0.95, show_default=True, help="Null band coverage.")
@handle_errors
def probe(manifest: Path, pair: str, permutations: int, seed: int, level: float) -> None:
    """Model-free separability score with a permutation null band."""
    result = separability_probe(
        load_manifest(manifest), ExperimentPair(pair), permutations, seed, level=level
    )
    click.echo(f"pair: {result.pair.value}  feature: {result.feature}")
    click.echo(f"score: {result.score:.4f}  null band: [{result.null_low:.4f}, {result.null_high:.4f}]")
    click.echo(f"positive: {result.n_positive}  negative: {result.n_negative}")


if __name__ == "__main__":
    cli()
