"""Base network class with a parameter registry and weight persistence."""

from abc import ABC, abstractmethod
from collections.abc import Sequence
from pathlib import Path
from typing import Any, ClassVar

import numpy as np

from src.errors import EmptyFrameList, ShapeMismatch
from src.micronet.ops import cross_entropy, softmax
from src.models.network import ModelKind, NetworkSpec
from src.state.container import decode_weights, encode_weights, read_bytes, write_bytes
from src.utils.logging import get_logger

logger = get_logger(__name__)

_REGISTRY: dict[ModelKind, type["Network"]] = {}


def kaiming_uniform(
    rng: np.random.Generator, shape: tuple[int, ...], fan_in: int, dtype: np.dtype
) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Network(ABC):
    """
    Binary classifier over per-sample frame stacks.

    A batch is a sequence of arrays, one per sample, each shaped (n_frames, C, F, W).
    The fixed-size pipeline passes single-frame stacks.
    """

    kind: ClassVar[ModelKind]

    def __init_subclass__(cls, kind: ModelKind | None = None, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        if kind is not None:
            cls.kind = kind
            _REGISTRY[kind] = cls

    def __init__(self, spec: NetworkSpec):
        self.spec = spec
        self.cfg = spec.cnn
        self.dtype = np.dtype(spec.dtype)
        self.params: dict[str, np.ndarray] = {}
        self.build(np.random.default_rng(spec.seed))

    def register_parameter(self, name: str, value: np.ndarray) -> None:
        """Add a named parameter tensor."""
        if name in self.params:
            raise ValueError(f"parameter {name!r} registered twice")
        self.params[name] = np.ascontiguousarray(value, dtype=self.dtype)

    @abstractmethod
    def build(self, rng: np.random.Generator) -> None:
        """Initialise and register all parameters from ``rng``."""

    @abstractmethod
    def forward(
        self, batch: Sequence[np.ndarray], per_frame: bool = False
    ) -> tuple[np.ndarray, Any]:
        """
        Compute logits (N, 2).

        Args:
            batch: one (n_frames, C, F, W) array per sample
            per_frame: extract features one frame at a time so that results do not
                depend on batch composition; no backward cache is kept

        Returns:
            (logits, cache) where cache feeds ``backward``
        """

    @abstractmethod
    def backward(self, cache: Any, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        """Parameter gradients given dLoss/dlogits."""

    def prepare(self, batch: Sequence[np.ndarray]) -> list[np.ndarray]:
        """Validate sample shapes and cast to the network dtype."""
        expected = (self.cfg.in_channels, self.cfg.freq_bins, self.cfg.input_width)
        prepared = []
        for i, sample in enumerate(batch):
            if sample.ndim != 4:
                raise ShapeMismatch(f"sample {i}: expected (n_frames, C, F, W), got {sample.shape}")
            if sample.shape[0] == 0:
                raise EmptyFrameList(f"sample {i} has no frames")
            if sample.shape[1:] != expected:
                raise ShapeMismatch(
                    f"sample {i}: frame shape {sample.shape[1:]} != network input {expected}"
                )
            prepared.append(np.asarray(sample, dtype=self.dtype))
        return prepared

    def loss(self, batch: Sequence[np.ndarray], labels: Sequence[int]) -> float:
        logits, _ = self.forward(batch)
        value, _ = cross_entropy(logits, np.asarray(labels))
        return value

    def loss_and_grads(
        self, batch: Sequence[np.ndarray], labels: Sequence[int]
    ) -> tuple[float, dict[str, np.ndarray]]:
        """Mean cross-entropy over the batch and its parameter gradients."""
        logits, cache = self.forward(batch)
        value, dlogits = cross_entropy(logits, np.asarray(labels))
        grads = self.backward(cache, dlogits.astype(self.dtype))
        return value, grads

    def predict_proba(self, batch: Sequence[np.ndarray]) -> np.ndarray:
        """Class probabilities (N, 2), column 1 = positive class."""
        logits, _ = self.forward(batch, per_frame=True)
        return softmax(logits)

    @property
    def n_parameters(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def describe(self) -> dict[str, Any]:
        """Architecture, layer shapes and parameter count."""
        return {
            "kind": self.kind.value,
            "input": list(self.cfg.shape_trace()[0][1]),
            "shapes": {name: list(shape) for name, shape in self.cfg.shape_trace()},
            "blstm": self.spec.blstm.model_dump() if self.spec.blstm else None,
            "n_parameters": self.n_parameters,
        }

    def copy_params(self) -> dict[str, np.ndarray]:
        return {name: value.copy() for name, value in self.params.items()}

    def load_params(self, params: dict[str, np.ndarray]) -> None:
        """Replace parameter values; names and shapes must match."""
        if set(params) != set(self.params):
            raise ShapeMismatch("parameter names do not match the network")
        for name, value in params.items():
            if value.shape != self.params[name].shape:
                raise ShapeMismatch(
                    f"{name}: shape {value.shape} != expected {self.params[name].shape}"
                )
            self.params[name] = np.ascontiguousarray(value, dtype=self.dtype)

    def save(self, path: Path) -> None:
        """Write the spec and float32 weights."""
        description = {"spec": self.spec.model_dump(mode="json")}
        write_bytes(Path(path), encode_weights(description, self.params))
        logger.info("weights_saved", path=str(path), n_parameters=self.n_parameters)

    @classmethod
    def load(cls, path: Path) -> "Network":
        description, tensors = decode_weights(read_bytes(Path(path)), source=str(path))
        network = build_network(NetworkSpec.model_validate(description["spec"]))
        network.load_params(tensors)
        return network


def build_network(spec: NetworkSpec) -> Network:
    """Instantiate the registered network class for ``spec.kind``."""
    try:
        network_cls = _REGISTRY[spec.kind]
    except KeyError as exc:
        raise ValueError(f"no network registered for {spec.kind.value}") from exc
    network = network_cls(spec)
    logger.debug("network_built", kind=spec.kind.value, n_parameters=network.n_parameters)
    return network
