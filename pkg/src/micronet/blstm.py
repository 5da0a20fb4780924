"""CNN features fed as a sequence through a bidirectional LSTM stack."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.errors import EmptySequence
from src.micronet.base import Network
from src.micronet.cnn import (
    FeatureCache,
    extract_features,
    extract_features_backward,
    frame_features,
    head_backward,
    head_forward,
    init_conv_params,
    init_head_params,
)
from src.micronet.lstm import (
    BlstmCache,
    blstm_stack_backward,
    blstm_stack_forward,
    lstm_param_names,
)
from src.models.network import BlstmConfig, ModelKind


def init_blstm_params(
    cfg: BlstmConfig, input_dim: int, rng: np.random.Generator, dtype: np.dtype
) -> dict[str, np.ndarray]:
    """Uniform(+-1/sqrt(fan_in)) weights, zero biases except forget gate = 1."""
    hidden = cfg.hidden_per_direction
    params: dict[str, np.ndarray] = {}
    layer_input = input_dim
    for layer in range(cfg.layers):
        bound = 1.0 / np.sqrt(layer_input + hidden)
        for direction in ("fwd", "bwd"):
            w_name, u_name, b_name = lstm_param_names(layer, direction)
            params[w_name] = rng.uniform(-bound, bound, size=(layer_input, 4 * hidden)).astype(dtype)
            params[u_name] = rng.uniform(-bound, bound, size=(hidden, 4 * hidden)).astype(dtype)
            bias = np.zeros(4 * hidden, dtype=dtype)
            bias[hidden : 2 * hidden] = 1.0
            params[b_name] = bias
        layer_input = 2 * hidden
    return params


def mean_over_time(outputs: np.ndarray) -> np.ndarray:
    return (outputs.sum(axis=0, dtype=np.float64) / outputs.shape[0]).astype(outputs.dtype)


def blstm_forward(
    features: np.ndarray, params: dict[str, np.ndarray], cfg: BlstmConfig
) -> np.ndarray:
    """
    Classify a sequence of per-frame feature vectors (T, D).

    Returns:
        logits (2,)
    """
    if features.ndim != 2 or features.shape[0] == 0:
        raise EmptySequence(f"expected a non-empty (T, D) feature sequence, got {features.shape}")
    outputs, _ = blstm_stack_forward(features, params, cfg.layers)
    logits, _ = head_forward(mean_over_time(outputs)[None], params)
    return logits[0]


@dataclass
class CnnBlstmCache:
    counts: np.ndarray
    features: FeatureCache
    sequences: list[BlstmCache]
    head: tuple[np.ndarray, np.ndarray]


class CnnBlstmNetwork(Network, kind=ModelKind.CNN_BLSTM):
    """Per-frame CNN features, BLSTM over frames, time mean, two dense layers."""

    @property
    def blstm_cfg(self) -> BlstmConfig:
        return self.spec.blstm or BlstmConfig()

    def build(self, rng: np.random.Generator) -> None:
        initial = {
            **init_conv_params(self.cfg, rng, self.dtype),
            **init_blstm_params(self.blstm_cfg, self.cfg.feature_dim, rng, self.dtype),
            **init_head_params(
                self.blstm_cfg.output_dim, self.cfg.fc_hidden, self.cfg.n_classes, rng, self.dtype
            ),
        }
        for name, value in initial.items():
            self.register_parameter(name, value)

    def forward(
        self, batch: Sequence[np.ndarray], per_frame: bool = False
    ) -> tuple[np.ndarray, Any]:
        samples = self.prepare(batch)
        layers = self.blstm_cfg.layers
        if per_frame:
            pooled = []
            for sample in samples:
                outputs, _ = blstm_stack_forward(
                    frame_features(sample, self.params, self.cfg), self.params, layers
                )
                pooled.append(mean_over_time(outputs))
            logits, _ = head_forward(np.stack(pooled), self.params)
            return logits, None

        counts = np.array([len(s) for s in samples])
        features, feature_cache = extract_features(np.concatenate(samples), self.params, self.cfg)
        pooled, sequences = [], []
        for sequence in np.split(features, np.cumsum(counts)[:-1]):
            outputs, seq_cache = blstm_stack_forward(sequence, self.params, layers)
            pooled.append(mean_over_time(outputs))
            sequences.append(seq_cache)
        logits, head_cache = head_forward(np.stack(pooled), self.params)
        return logits, CnnBlstmCache(
            counts=counts, features=feature_cache, sequences=sequences, head=head_cache
        )

    def backward(self, cache: CnnBlstmCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        dpooled, grads = head_backward(dlogits, cache.head, self.params)
        dfeature_parts = []
        for i, (count, seq_cache) in enumerate(zip(cache.counts, cache.sequences)):
            doutputs = np.broadcast_to(dpooled[i] / self.dtype.type(count), (count, dpooled.shape[1]))
            dsequence, seq_grads = blstm_stack_backward(
                np.ascontiguousarray(doutputs), seq_cache, self.params
            )
            dfeature_parts.append(dsequence)
            for name, value in seq_grads.items():
                grads[name] = grads[name] + value if name in grads else value
        grads.update(
            extract_features_backward(
                np.concatenate(dfeature_parts), cache.features, self.params, self.cfg
            )
        )
        return grads
