"""Pytest configuration and fixtures."""

import logging
from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest
import structlog

from src.config import get_settings
from src.models.network import BlstmConfig, CnnConfig, ModelKind, NetworkSpec
from src.models.telemetry import Manifest
from src.models.training import TrainPolicy
from src.synth.generator import generate_cohort
from tests.factories import tiny_cohort_spec


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Generator[None, None, None]:
    """Fresh settings per test with cache and reports under the test's temporary directory."""
    monkeypatch.setenv("GRAPHOCOG_CACHE", str(tmp_path / "cache"))
    monkeypatch.setenv("GRAPHOCOG_OUTPUT_DIR", str(tmp_path / "reports"))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
    # setup_logging binds the current stderr, which CliRunner replaces per invocation
    structlog.reset_defaults()
    logging.getLogger().handlers.clear()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


def _tiny_cnn_config() -> CnnConfig:
    return CnnConfig(
        in_channels=2, freq_bins=16, input_width=12, conv1_filters=4, conv2_filters=4, fc_hidden=8
    )


@pytest.fixture
def tiny_cnn_spec() -> NetworkSpec:
    """float64 CNN small enough for finite differences."""
    return NetworkSpec(kind=ModelKind.CNN, cnn=_tiny_cnn_config(), seed=3, dtype="float64")


@pytest.fixture
def tiny_blstm_spec() -> NetworkSpec:
    """float64 CNN-BLSTM with one 8-unit layer."""
    return NetworkSpec(
        kind=ModelKind.CNN_BLSTM,
        cnn=_tiny_cnn_config(),
        blstm=BlstmConfig(layers=1, hidden_per_direction=8),
        seed=5,
        dtype="float64",
    )


@pytest.fixture
def fast_policy() -> TrainPolicy:
    return TrainPolicy(max_epochs=3, batch_size=8, stop_patience=3)


@pytest.fixture
def tiny_cohort(tmp_path: Path) -> Manifest:
    """12 subjects (6 CTL, 6 PD), 2 tasks each, 2-3 s recordings."""
    return generate_cohort(tiny_cohort_spec(), tmp_path / "cohort")
