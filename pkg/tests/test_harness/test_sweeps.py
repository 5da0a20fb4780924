"""Tests for the window, channel and task sweeps."""

import pytest

from src.errors import ConfigError, DuplicateCombination, UnknownChannel
from src.harness.sweeps import (
    CHANNEL_COMBINATIONS,
    DEFAULT_WINDOWS,
    check_combinations,
    mark_best,
    sweep_channels,
    sweep_tasks,
    sweep_windows,
    task_rows,
)
from src.micronet import build_network
from src.models.network import ModelKind
from src.models.run import RunConfig
from src.models.spectrogram import StftConfig, WindowSpec
from src.models.telemetry import Manifest
from src.utils.tracing import RunTracer
from tests.factories import tiny_run_config


def test_default_windows_map_to_widths() -> None:
    column = StftConfig().column_duration_s
    assert [WindowSpec.parse(w).columns(column) for w in DEFAULT_WINDOWS] == [1, 1, 1, 2, 3]


def test_task_rows() -> None:
    rows = task_rows()
    assert len(rows) == 18
    assert rows[:4] == ["SpiralPataka", "SpiralRight", "SpiralLeft", "Spiral"]
    assert rows[-1] == "Drawing"


def test_channel_combinations() -> None:
    assert len(CHANNEL_COMBINATIONS) == 10
    assert check_combinations(CHANNEL_COMBINATIONS) == list(CHANNEL_COMBINATIONS)
    with pytest.raises(DuplicateCombination):
        check_combinations([("vx", "vy"), ("vy", "vx")])


def test_three_channel_first_layer_size() -> None:
    config = RunConfig.build(pair="ad-ctl", channels=["vx", "vy", "p"])
    params = build_network(config.network_spec(seed=0)).params
    assert params["conv1.weight"].size + params["conv1.bias"].size == 896


def test_window_sweep_needs_frames_pipeline(tiny_cohort: Manifest) -> None:
    with pytest.raises(ConfigError):
        sweep_windows(tiny_cohort, tiny_run_config(tiny_cohort))


def test_window_sweep_rows(tiny_cohort: Manifest) -> None:
    base = tiny_run_config(tiny_cohort, pipeline="frames", window="cols:2")
    tracer = RunTracer("windows")
    reports = sweep_windows(
        tiny_cohort, base, windows=["cols:2", "cols:8"], models=[ModelKind.CNN], tracer=tracer
    )
    assert [r.label for r in reports] == ["cnn cols:2", "cnn cols:8"]
    assert [r.metadata.window for r in reports] == ["cols:2", "cols:8"]
    assert sum(r.best for r in reports) == 1
    assert tracer.get_trace_summary()["total_events"] == 2


def test_channel_sweep_rows(tiny_cohort: Manifest) -> None:
    reports = sweep_channels(
        tiny_cohort, tiny_run_config(tiny_cohort), combinations=[("vx", "vy"), ("speed", "p")]
    )
    assert [r.label for r in reports] == ["{vx,vy}", "{speed,p}"]
    assert [r.metadata.channels for r in reports] == [["vx", "vy"], ["speed", "p"]]


def test_channel_sweep_rejects_bad_rows(tiny_cohort: Manifest) -> None:
    base = tiny_run_config(tiny_cohort)
    with pytest.raises(DuplicateCombination):
        sweep_channels(tiny_cohort, base, combinations=[("vx", "p"), ("p", "vx")])
    with pytest.raises(UnknownChannel):
        sweep_channels(tiny_cohort, base, combinations=[("vx", "bogus")])
    with pytest.raises(ConfigError):
        sweep_channels(tiny_cohort, base.evolve(pipeline="frames", window="1s"))


def test_unknown_channel_is_reported_as_such() -> None:
    with pytest.raises(UnknownChannel):
        RunConfig.build(channels=["vx", "bogus"])


def test_task_sweep_rows(tiny_cohort: Manifest) -> None:
    reports = sweep_tasks(tiny_cohort, tiny_run_config(tiny_cohort), rows=["SpiralRight", "Writing"])
    assert [r.label for r in reports] == ["SpiralRight", "Writing"]
    assert all(r.pooled.n_samples == 12 for r in reports)
    assert [r.metadata.task_filter for r in reports] == ["SpiralRight", "Writing"]


def test_mark_best_takes_first_on_ties(tiny_cohort: Manifest) -> None:
    reports = sweep_tasks(tiny_cohort, tiny_run_config(tiny_cohort), rows=["SpiralRight"])
    twice = mark_best([reports[0], reports[0]])
    assert [r.best for r in twice] == [reports[0].pooled.f1 is not None, False]


def test_window_size_changes_the_scores(tiny_cohort: Manifest) -> None:
    """On a cohort with a tremor signature the rows are not all the same."""
    base = tiny_run_config(tiny_cohort, pipeline="frames", window="cols:1")
    reports = sweep_windows(
        tiny_cohort, base, windows=["cols:1", "cols:3", "cols:8"], models=[ModelKind.CNN]
    )
    outcomes = {
        (r.pooled.model_dump_json(), tuple(f.metrics.model_dump_json() for f in r.folds))
        for r in reports
    }
    assert len(outcomes) >= 2
