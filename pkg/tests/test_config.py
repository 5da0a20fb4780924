"""Tests for process settings and the run configuration."""

from pathlib import Path

import orjson
import pytest

from src.config import get_settings
from src.errors import ConfigError, InvalidChannelSelection
from src.main import build_config
from src.models.network import ModelKind
from src.models.run import RunConfig


def test_settings_from_environment(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("GRAPHOCOG_CACHE_DIR", str(tmp_path / "other"))
    monkeypatch.delenv("GRAPHOCOG_CACHE")
    monkeypatch.setenv("GRAPHOCOG_LOG_LEVEL", "debug")
    monkeypatch.setenv("GRAPHOCOG_MAX_JOBS", "0")
    get_settings.cache_clear()
    settings = get_settings()
    assert settings.cache_dir == tmp_path / "other"
    assert settings.log_level == "DEBUG"
    assert settings.max_jobs == 1


def test_invalid_log_level(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("GRAPHOCOG_LOG_LEVEL", "chatty")
    get_settings.cache_clear()
    with pytest.raises(ValueError):
        get_settings()


def test_defaults() -> None:
    config = RunConfig.build()
    assert config.channels == ("speed", "vx", "vy", "p")
    assert config.folds == 10
    assert config.input_width == 65
    assert config.network_spec(seed=0).cnn.feature_dim == 26880


def test_best_channels_follow_the_pair() -> None:
    assert RunConfig.build(pair="ad-ctl", channels="best").channels == ("vx", "vy", "p")
    assert RunConfig.build(pair="pd-ctl", channels="best").channels == ("acc", "vx", "vy", "p")
    assert RunConfig.build(pair="pd-pdm", channels="best").channels == ("traj", "vx", "vy", "p")


@pytest.mark.parametrize(
    "data",
    [
        {"model": "cnn-blstm"},
        {"pipeline": "fixed", "window": "1s"},
        {"pipeline": "frames"},
        {"folds": 2},
        {"task": "Juggling"},
        {"policy": {"lr": -1}},
    ],
)
def test_invalid_combinations(data: dict[str, object]) -> None:
    with pytest.raises(ConfigError):
        RunConfig.build(**data)


def test_channel_selection_errors_keep_their_type() -> None:
    with pytest.raises(InvalidChannelSelection):
        RunConfig.build(channels=["vx"])


def test_frames_width_and_network() -> None:
    config = RunConfig.build(pipeline="frames", window="1.5s", model="cnn-blstm")
    assert config.input_width == 3
    spec = config.network_spec(seed=4)
    assert spec.kind == ModelKind.CNN_BLSTM
    assert spec.blstm is not None and spec.blstm.layers == 3
    assert spec.cnn.time_padding == 1


def test_config_file_with_dotted_keys(tmp_path: Path) -> None:
    path = tmp_path / "run.json"
    path.write_bytes(orjson.dumps({"pair": "pd-pdm", "stft.hop": 64, "policy.max_epochs": 5}))
    config = RunConfig.from_sources(path, {"pair": "ad-ctl", "seed": None})
    assert config.pair.value == "ad-ctl"
    assert config.stft.hop == 64
    assert config.policy.max_epochs == 5
    assert config.seed == 0


def test_config_file_errors(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        RunConfig.from_sources(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig.from_sources(bad)


def test_config_hash_ignores_paths_and_jobs(tmp_path: Path) -> None:
    base = RunConfig.build(seed=1)
    assert base.evolve(jobs=4, out_dir=tmp_path).config_hash() == base.config_hash()
    assert base.evolve(seed=2).config_hash() != base.config_hash()
    assert len(base.config_hash()) == 64


def test_environment_cache_beats_config_file(tmp_path: Path) -> None:
    """GRAPHOCOG_CACHE (set by the autouse fixture) wins over the file's cache_dir."""
    path = tmp_path / "run.json"
    path.write_bytes(orjson.dumps({"cache_dir": str(tmp_path / "from-file")}))
    assert build_config(path).cache_dir == tmp_path / "cache"


def test_config_file_cache_used_without_environment(
    monkeypatch: pytest.MonkeyPatch, tmp_path: Path
) -> None:
    monkeypatch.delenv("GRAPHOCOG_CACHE")
    get_settings.cache_clear()
    path = tmp_path / "run.json"
    path.write_bytes(orjson.dumps({"cache_dir": str(tmp_path / "from-file")}))
    assert build_config(path).cache_dir == tmp_path / "from-file"


def test_out_flag_beats_environment(tmp_path: Path) -> None:
    assert build_config(None).out_dir == tmp_path / "reports"
    assert build_config(None, out_dir=tmp_path / "flag").out_dir == tmp_path / "flag"
