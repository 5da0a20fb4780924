"""End-to-end learnability on synthetic cohorts (slow).

The 15-per-group runs use a shrunk network; the default-cohort runs use every default.
"""

from pathlib import Path

import pytest

from src.harness.dataset import load_samples
from src.harness.runner import cross_validate
from src.models.cohort import CohortSpec
from src.models.run import RunConfig
from src.models.telemetry import Manifest
from src.synth.generator import generate_cohort
from tests.factories import tiny_cohort_spec

pytestmark = pytest.mark.slow


def _config(manifest_path: Path, **changes: object) -> RunConfig:
    data: dict[str, object] = {
        "pair": "pd-ctl",
        "channels": ["vx", "vy", "p"],
        "folds": 5,
        "manifest": manifest_path,
        "policy": {"max_epochs": 20, "batch_size": 8, "stop_patience": 6, "lr": 0.001},
        "network": {"conv1_filters": 8, "conv2_filters": 16, "fc_hidden": 32, "blstm_layers": 1, "blstm_hidden": 16},
        "normalize": True,
    }
    data.update(changes)
    return RunConfig.build(**data)


def _cohort(tmp_path: Path, amplitude: float) -> Manifest:
    spec = tiny_cohort_spec(seed=3, amplitude=amplitude, per_group=15).model_copy(
        update={"duration_s": (12.0, 20.0)}
    )
    return generate_cohort(spec, tmp_path / f"cohort-{amplitude}")


def test_cnn_learns_tremor_signature(tmp_path: Path) -> None:
    manifest = _cohort(tmp_path, 1.0)
    config = _config(manifest.source)
    report = cross_validate(load_samples(manifest, config), config, jobs=5)
    assert report.pooled.f1 is not None and report.pooled.f1 > 70.0
    assert report.pooled.auc is not None and report.pooled.auc > 75.0


def test_cnn_blstm_learns_tremor_signature(tmp_path: Path) -> None:
    manifest = _cohort(tmp_path, 1.0)
    config = _config(manifest.source, pipeline="frames", window="1s", model="cnn-blstm")
    report = cross_validate(load_samples(manifest, config), config, jobs=5)
    assert report.pooled.auc is not None and report.pooled.auc > 70.0


def test_no_signature_no_signal(tmp_path: Path) -> None:
    manifest = _cohort(tmp_path, 0.0)
    config = _config(manifest.source)
    report = cross_validate(load_samples(manifest, config), config, jobs=5)
    assert report.pooled.auc is not None and 25.0 <= report.pooled.auc <= 75.0


def _default_run(tmp_path: Path, amplitude: float) -> float | None:
    """Default 113-subject cohort, default CNN, fixed pipeline, 10-fold CV on pd-ctl."""
    manifest = generate_cohort(
        CohortSpec(amplitude=amplitude, seed=11), tmp_path / f"default-{amplitude}", jobs=4
    )
    config = RunConfig.build(pair="pd-ctl", manifest=manifest.source)
    assert config.folds == 10
    report = cross_validate(load_samples(manifest, config, jobs=4), config, jobs=4)
    return report.pooled.f1


def test_default_cohort_reaches_target_f1(tmp_path: Path) -> None:
    f1 = _default_run(tmp_path, 1.0)
    assert f1 is not None and f1 >= 90.0


def test_default_cohort_without_signature_is_at_chance(tmp_path: Path) -> None:
    f1 = _default_run(tmp_path, 0.0)
    assert f1 is not None and 35.0 <= f1 <= 65.0
