"""Run configuration model and config-file loading."""

import hashlib
from enum import Enum
from pathlib import Path
from typing import Any

import orjson
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.errors import ConfigError, GraphocogError, InvalidChannelSelection, UnknownChannel
from src.models.network import BlstmConfig, CnnConfig, ModelKind, NetworkSpec
from src.models.spectrogram import StftConfig, WindowSpec
from src.models.telemetry import CHANNEL_NAMES, Task, TaskGroup
from src.models.training import DEFAULT_CHANNELS, ExperimentPair, TrainPolicy


class Pipeline(str, Enum):
    """Spectrogram input representation."""

    FIXED = "fixed"
    FRAMES = "frames"


FIXED_COLUMNS = 65


class NetworkOverrides(BaseModel):
    """Architecture knobs the run config may change."""

    model_config = {"frozen": True}

    conv1_filters: int = Field(default=32, ge=1)
    conv2_filters: int = Field(default=64, ge=1)
    fc_hidden: int = Field(default=128, ge=1)
    blstm_layers: int = Field(default=3, ge=1)
    blstm_hidden: int = Field(default=64, ge=1)


def resolve_channels(value: str | list[str] | tuple[str, ...], pair: ExperimentPair) -> tuple[str, ...]:
    """Parse a channel list (comma string, ``best`` or sequence) and validate it."""
    if isinstance(value, str):
        if value.strip() == "best":
            return pair.best_channels
        names = [part.strip() for part in value.split(",") if part.strip()]
    else:
        names = list(value)
    if len(set(names)) != len(names):
        raise InvalidChannelSelection(f"channel selection repeats a channel: {names}")
    if not 2 <= len(names) <= 5:
        raise InvalidChannelSelection(f"select 2 to 5 channels, got {len(names)}")
    unknown = [n for n in names if n not in CHANNEL_NAMES]
    if unknown:
        raise UnknownChannel(f"unknown channel(s) {unknown}; valid: {list(CHANNEL_NAMES)}")
    return tuple(names)


def resolve_task_filter(value: str | None) -> tuple[Task, ...] | None:
    """Task name or task-group name to the tasks it selects."""
    if value is None:
        return None
    for group in TaskGroup:
        if value == group.value:
            return group.tasks
    try:
        return (Task(value),)
    except ValueError as exc:
        raise ConfigError(f"unknown task or task group {value!r}") from exc


class RunConfig(BaseModel):
    """Declarative description of one experiment run."""

    model_config = {"frozen": True}

    pair: ExperimentPair = ExperimentPair.AD_CTL
    pipeline: Pipeline = Pipeline.FIXED
    model: ModelKind = ModelKind.CNN
    channels: tuple[str, ...] = DEFAULT_CHANNELS
    window: WindowSpec | None = None
    task: str | None = None
    seed: int = 0
    folds: int = Field(default=10, ge=3)
    jobs: int = Field(default=1, ge=1)
    manifest: Path | None = None
    cache_dir: Path | None = None
    out_dir: Path | None = None
    normalize: bool = False
    stft: StftConfig = Field(default_factory=StftConfig)
    policy: TrainPolicy = Field(default_factory=TrainPolicy)
    network: NetworkOverrides = Field(default_factory=NetworkOverrides)

    @field_validator("window", mode="before")
    @classmethod
    def parse_window(cls, v: Any) -> Any:
        if isinstance(v, str):
            return WindowSpec.parse(v)
        return v

    @model_validator(mode="before")
    @classmethod
    def parse_channels(cls, data: Any) -> Any:
        if isinstance(data, dict) and "channels" in data:
            pair = ExperimentPair(data.get("pair", ExperimentPair.AD_CTL))
            data = {**data, "channels": resolve_channels(data["channels"], pair)}
        return data

    @model_validator(mode="after")
    def check_combination(self) -> "RunConfig":
        """Pipeline, model and window must agree."""
        if self.model == ModelKind.CNN_BLSTM and self.pipeline != Pipeline.FRAMES:
            raise ValueError("cnn-blstm runs only on the frames pipeline")
        if self.pipeline == Pipeline.FIXED and self.window is not None:
            raise ValueError("the fixed pipeline does not take a window")
        if self.pipeline == Pipeline.FRAMES and self.window is None:
            raise ValueError("the frames pipeline needs a window")
        resolve_task_filter(self.task)
        return self

    @classmethod
    def build(cls, **data: Any) -> "RunConfig":
        """
        Validate, mapping validation failures to ``ConfigError``.

        Pipeline errors raised inside a validator (``UnknownChannel``,
        ``InvalidChannelSelection``, ``InvalidWindow``) are re-raised unchanged.
        """
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            for err in exc.errors():
                original = err.get("ctx", {}).get("error")
                if isinstance(original, GraphocogError):
                    raise original from exc
            raise ConfigError(_format_validation(exc)) from exc

    @classmethod
    def from_sources(
        cls, config_path: Path | None = None, overrides: dict[str, Any] | None = None
    ) -> "RunConfig":
        """Merge a dotted-key config file with command-line overrides (flags win)."""
        data: dict[str, Any] = {}
        if config_path is not None:
            data = load_config_file(config_path)
        for key, value in (overrides or {}).items():
            if value is not None:
                _set_dotted(data, key, value)
        return cls.build(**data)

    def evolve(self, **changes: Any) -> "RunConfig":
        """Copy with changed fields, re-validated."""
        data = self.model_dump(mode="python")
        data.update(changes)
        return RunConfig.build(**data)

    @property
    def task_filter(self) -> tuple[Task, ...] | None:
        return resolve_task_filter(self.task)

    @property
    def input_width(self) -> int:
        """Time columns of one network input."""
        if self.window is None:
            return FIXED_COLUMNS
        return self.window.columns(self.stft.column_duration_s)

    def network_spec(self, seed: int, dtype: str = "float32") -> NetworkSpec:
        cnn = CnnConfig(
            in_channels=len(self.channels),
            freq_bins=self.stft.n_bins,
            input_width=self.input_width,
            conv1_filters=self.network.conv1_filters,
            conv2_filters=self.network.conv2_filters,
            fc_hidden=self.network.fc_hidden,
        )
        blstm = None
        if self.model == ModelKind.CNN_BLSTM:
            blstm = BlstmConfig(
                layers=self.network.blstm_layers,
                hidden_per_direction=self.network.blstm_hidden,
            )
        return NetworkSpec(kind=self.model, cnn=cnn, blstm=blstm, seed=seed, dtype=dtype)

    def config_hash(self) -> str:
        """SHA-256 of the result-relevant configuration."""
        payload = self.model_dump(mode="json", exclude={"jobs", "out_dir", "cache_dir", "manifest"})
        return hashlib.sha256(orjson.dumps(payload, option=orjson.OPT_SORT_KEYS)).hexdigest()


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a JSON object with flat dotted keys into a nested dict."""
    try:
        raw = orjson.loads(Path(path).read_bytes())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except orjson.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    nested: dict[str, Any] = {}
    for key, value in raw.items():
        _set_dotted(nested, key, value)
    return nested


def _set_dotted(target: dict[str, Any], key: str, value: Any) -> None:
    parts = key.split(".")
    node = target
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError(f"config key {key!r} conflicts with a scalar at {part!r}")
        node = child
    node[parts[-1]] = value


def _format_validation(exc: ValidationError) -> str:
    lines = []
    for err in exc.errors():
        where = ".".join(str(loc) for loc in err["loc"]) or "config"
        lines.append(f"{where}: {err['msg']}")
    return "invalid run configuration: " + "; ".join(lines)
