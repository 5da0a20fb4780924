"""Tests for the synthetic cohort generator."""

from pathlib import Path

import numpy as np
import pytest
from scipy.stats import ks_2samp

from src.errors import DataIoError
from src.models.cohort import CohortSpec
from src.models.telemetry import Group, Task
from src.synth.generator import SubjectPlan, generate_cohort, subject_plan, synthesize_recording
from src.telemetry.channels import derive_channels
from src.telemetry.loader import load_manifest, validate_manifest


def _small_spec(**changes: object) -> CohortSpec:
    data: dict[str, object] = {
        "group_counts": {Group.CTL: 2, Group.PD: 2, Group.PDM: 2, Group.AD: 2},
        "tasks": [Task.SPIRAL_RIGHT, Task.POINT_LEFT],
        "duration_s": (1.0, 2.0),
        "seed": 11,
    }
    data.update(changes)
    return CohortSpec.model_validate(data)


def test_file_count_and_layout(tmp_path: Path) -> None:
    manifest = generate_cohort(_small_spec(), tmp_path)
    assert len(manifest) == 16
    assert len(list((tmp_path / "recordings").glob("*.csv"))) == 16
    assert len(manifest.subjects) == 8
    reloaded = load_manifest(tmp_path / "manifest.jsonl")
    assert [e.key for e in reloaded.entries] == [e.key for e in manifest.entries]


def test_subject_ids_follow_group_order() -> None:
    ids = [plan.subject_id for plan in subject_plan(_small_spec())]
    assert ids[:3] == ["CTL001", "CTL002", "PD001"]
    assert ids[-1] == "AD002"


def test_same_seed_same_bytes(tmp_path: Path) -> None:
    generate_cohort(_small_spec(), tmp_path / "a")
    generate_cohort(_small_spec(), tmp_path / "b", jobs=4)
    for path in sorted((tmp_path / "a").rglob("*")):
        if path.is_file():
            twin = tmp_path / "b" / path.relative_to(tmp_path / "a")
            assert path.read_bytes() == twin.read_bytes(), path.name


def test_different_seed_changes_data(tmp_path: Path) -> None:
    generate_cohort(_small_spec(), tmp_path / "a")
    generate_cohort(_small_spec(seed=12), tmp_path / "b")
    name = "recordings/CTL001_SpiralRight.csv"
    assert (tmp_path / "a" / name).read_bytes() != (tmp_path / "b" / name).read_bytes()


def test_generated_files_validate(tmp_path: Path) -> None:
    assert validate_manifest(generate_cohort(_small_spec(), tmp_path)) == []


def test_pd_velocity_has_tremor_peak() -> None:
    spec = _small_spec(duration_s=(20.0, 20.0))
    recording = synthesize_recording(spec, SubjectPlan(2, "PD001", Group.PD), 0, Task.SPIRAL_RIGHT)
    vx = derive_channels(recording)["vx"]
    spectrum = np.abs(np.fft.rfft(vx - vx.mean()))
    freqs = np.fft.rfftfreq(vx.size, d=1.0 / 250.0)
    band = (freqs >= 4.0) & (freqs <= 6.0)
    wide = (freqs >= 2.0) & (freqs <= 8.0)
    assert spectrum[band].max() >= 10 * np.median(spectrum[wide])


def test_zero_amplitude_makes_groups_identical() -> None:
    """With no signature, a subject's data does not depend on its group."""
    spec = _small_spec(amplitude=0.0)
    reference = synthesize_recording(spec, SubjectPlan(3, "S", Group.CTL), 1, Task.SPIRAL_RIGHT)
    for group in (Group.PD, Group.PDM, Group.AD):
        other = synthesize_recording(spec, SubjectPlan(3, "S", group), 1, Task.SPIRAL_RIGHT)
        np.testing.assert_array_equal(other.x, reference.x)
        np.testing.assert_array_equal(other.y, reference.y)
        np.testing.assert_array_equal(other.p, reference.p)


def test_zero_amplitude_groups_share_distributions() -> None:
    """50 CTL vs 50 PD at amplitude 0: two-sample KS accepts every summary statistic."""
    spec = _small_spec(
        group_counts={Group.CTL: 50, Group.PD: 50, Group.PDM: 0, Group.AD: 0},
        tasks=[Task.SPIRAL_RIGHT],
        amplitude=0.0,
    )
    stats: dict[Group, dict[str, list[float]]] = {Group.CTL: {}, Group.PD: {}}
    for plan in subject_plan(spec):
        recording = synthesize_recording(spec, plan, 0, Task.SPIRAL_RIGHT)
        channels = derive_channels(recording)
        row = {
            "duration_s": recording.duration_s,
            "samples": float(len(recording)),
            "mean_speed": float(channels["speed"].mean()),
            "vx_std": float(channels["vx"].std()),
            "mean_pressure": float(channels["p"].mean()),
        }
        for name, value in row.items():
            stats[plan.group].setdefault(name, []).append(value)

    for name in stats[Group.CTL]:
        result = ks_2samp(stats[Group.CTL][name], stats[Group.PD][name])
        assert result.pvalue > 0.01, name


def test_durations_within_range() -> None:
    spec = _small_spec(duration_s=(1.5, 2.5))
    for plan in subject_plan(spec):
        recording = synthesize_recording(spec, plan, 0, Task.SPIRAL_RIGHT)
        assert 1.5 - 0.01 <= recording.duration_s <= 2.5


def test_bad_output_directory(tmp_path: Path) -> None:
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    with pytest.raises(DataIoError) as excinfo:
        generate_cohort(_small_spec(), blocker / "cohort")
    assert excinfo.value.exit_code == 2


def test_spec_validation() -> None:
    with pytest.raises(ValueError):
        _small_spec(duration_s=(3.0, 1.0))
    with pytest.raises(ValueError):
        _small_spec(tasks=[])
