"""Tests for the separability probe."""

from pathlib import Path

import numpy as np
import pytest

from src.models.telemetry import ChannelSet, Group, Manifest
from src.models.training import ExperimentPair
from src.synth.generator import generate_cohort
from src.synth.probe import (
    ProbeResult,
    permutation_band,
    separability_probe,
    standardized_difference,
    tremor_band_ratio,
)
from tests.factories import tiny_cohort_spec


def _sinusoid_channels(freq_hz: float, seconds: float = 10.0) -> ChannelSet:
    t = np.arange(int(seconds * 250)) / 250.0
    wave = 5.0 * np.sin(2 * np.pi * freq_hz * t)
    return ChannelSet(channels={"vx": wave, "vy": 0.5 * wave}, dt=0.004)


def _score_cohort(tmp_path: Path, amplitude: float, **kwargs: object) -> ProbeResult:
    manifest = generate_cohort(tiny_cohort_spec(amplitude=amplitude), tmp_path / f"a{amplitude}")
    return separability_probe(manifest, ExperimentPair.PD_CTL, **kwargs)


def test_standardized_difference() -> None:
    values = np.array([1.0, 2.0, 3.0, 5.0, 6.0, 7.0])
    labels = np.array([0, 0, 0, 1, 1, 1])
    assert standardized_difference(values, labels) == pytest.approx(4.0)
    assert standardized_difference(values, 1 - labels) == pytest.approx(-4.0)
    assert standardized_difference(np.ones(6), labels) == 0.0


def test_permutation_band_is_reproducible(rng: np.random.Generator) -> None:
    values = rng.normal(size=30)
    labels = np.repeat([0, 1], 15)
    low, high = permutation_band(values, labels, 100, seed=5)
    assert low < 0 < high
    assert (low, high) == permutation_band(values, labels, 100, seed=5)


def test_tremor_band_ratio_tells_the_bands_apart() -> None:
    assert tremor_band_ratio(_sinusoid_channels(5.0)) > 1.0
    assert tremor_band_ratio(_sinusoid_channels(3.0)) < -1.0


def test_pd_pdm_feature_follows_the_tremor_band(tmp_path: Path) -> None:
    spec = tiny_cohort_spec().model_copy(
        update={"group_counts": {Group.CTL: 0, Group.PD: 6, Group.PDM: 6, Group.AD: 0}}
    )
    result = separability_probe(generate_cohort(spec, tmp_path), ExperimentPair.PD_PDM)
    assert result.feature == "tremor_band_ratio"
    assert result.score > result.null_high


def test_signature_amplitude_separates_groups(tmp_path: Path) -> None:
    flat = _score_cohort(tmp_path, 0.0)
    strong = _score_cohort(tmp_path, 1.0)
    assert strong.feature == "tremor_share"
    assert strong.score > flat.score
    assert strong.score > strong.null_high
    assert not strong.within_null
    assert strong.n_positive == strong.n_negative == 12


def test_score_grows_with_amplitude(tmp_path: Path) -> None:
    scores = [_score_cohort(tmp_path, amplitude).score for amplitude in (0.25, 0.5, 1.0)]
    assert scores[0] < scores[1] < scores[2]


def test_zero_amplitude_score_is_inside_the_null_band(tmp_path: Path) -> None:
    result = _score_cohort(tmp_path, 0.0, n_permutations=400, level=0.99)
    assert result.within_null


def test_permuted_labels_fall_inside_the_null_band(tiny_cohort: Manifest) -> None:
    true = separability_probe(tiny_cohort, ExperimentPair.PD_CTL, seed=1)
    labels = np.array([1 if e.group == Group.PD else 0 for e in tiny_cohort.entries])
    shuffled = np.random.default_rng(0).permutation(labels)
    permuted = separability_probe(
        tiny_cohort, ExperimentPair.PD_CTL, n_permutations=400, seed=1, labels=shuffled, level=0.99
    )
    assert abs(permuted.score) < true.score
    assert permuted.n_positive == 12
    assert permuted.within_null
    assert not true.within_null
