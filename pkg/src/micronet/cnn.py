"""Convolutional feature extractor, classifier head and the CNN network."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.errors import EmptyFrameList, ShapeMismatch
from src.micronet.base import Network, kaiming_uniform
from src.micronet.ops import (
    conv2d_backward,
    conv2d_forward,
    dense_backward,
    dense_forward,
    maxpool2d,
    maxpool2d_backward,
    relu,
    relu_backward,
)
from src.models.network import CnnConfig, ModelKind

POOL = 2


def init_conv_params(
    cfg: CnnConfig, rng: np.random.Generator, dtype: np.dtype
) -> dict[str, np.ndarray]:
    k = cfg.kernel_size
    return {
        "conv1.weight": kaiming_uniform(
            rng, (cfg.conv1_filters, cfg.in_channels, k, k), cfg.in_channels * k * k, dtype
        ),
        "conv1.bias": np.zeros(cfg.conv1_filters, dtype=dtype),
        "conv2.weight": kaiming_uniform(
            rng, (cfg.conv2_filters, cfg.conv1_filters, k, k), cfg.conv1_filters * k * k, dtype
        ),
        "conv2.bias": np.zeros(cfg.conv2_filters, dtype=dtype),
    }


def init_head_params(
    in_dim: int, hidden: int, n_classes: int, rng: np.random.Generator, dtype: np.dtype
) -> dict[str, np.ndarray]:
    return {
        "fc1.weight": kaiming_uniform(rng, (in_dim, hidden), in_dim, dtype),
        "fc1.bias": np.zeros(hidden, dtype=dtype),
        "fc2.weight": kaiming_uniform(rng, (hidden, n_classes), hidden, dtype),
        "fc2.bias": np.zeros(n_classes, dtype=dtype),
    }


@dataclass
class FeatureCache:
    x: np.ndarray
    z1: np.ndarray
    p1: np.ndarray
    arg1: np.ndarray
    z2: np.ndarray
    arg2: np.ndarray
    p2_shape: tuple[int, ...]


def _pool_widths(cfg: CnnConfig) -> tuple[int, int]:
    first, second = cfg.pool_time()
    return (POOL if first else 1), (POOL if second else 1)


def extract_features(
    x: np.ndarray, params: dict[str, np.ndarray], cfg: CnnConfig
) -> tuple[np.ndarray, FeatureCache]:
    """conv-ReLU-pool twice, flattened. ``x`` is (N, C, F, W); returns (N, D)."""
    if x.shape[1:] != (cfg.in_channels, cfg.freq_bins, cfg.input_width):
        raise ShapeMismatch(
            f"input {x.shape[1:]} != expected "
            f"{(cfg.in_channels, cfg.freq_bins, cfg.input_width)}"
        )
    pad = cfg.time_padding
    pool1_w, pool2_w = _pool_widths(cfg)

    z1 = conv2d_forward(x, params["conv1.weight"], params["conv1.bias"], pad_w=pad)
    p1, arg1 = maxpool2d(relu(z1), POOL, pool1_w)
    z2 = conv2d_forward(p1, params["conv2.weight"], params["conv2.bias"], pad_w=pad)
    p2, arg2 = maxpool2d(relu(z2), POOL, pool2_w)

    features = p2.reshape(p2.shape[0], -1)
    return features, FeatureCache(x=x, z1=z1, p1=p1, arg1=arg1, z2=z2, arg2=arg2, p2_shape=p2.shape)


def extract_features_backward(
    dfeatures: np.ndarray, cache: FeatureCache, params: dict[str, np.ndarray], cfg: CnnConfig
) -> dict[str, np.ndarray]:
    pad = cfg.time_padding
    pool1_w, pool2_w = _pool_widths(cfg)

    dp2 = dfeatures.reshape(cache.p2_shape)
    dz2 = relu_backward(maxpool2d_backward(dp2, cache.arg2, cache.z2.shape, POOL, pool2_w), cache.z2)
    dp1, dk2, db2 = conv2d_backward(dz2, cache.p1, params["conv2.weight"], pad_w=pad)
    dz1 = relu_backward(maxpool2d_backward(dp1, cache.arg1, cache.z1.shape, POOL, pool1_w), cache.z1)
    _, dk1, db1 = conv2d_backward(dz1, cache.x, params["conv1.weight"], pad_w=pad, need_dx=False)
    return {"conv1.weight": dk1, "conv1.bias": db1, "conv2.weight": dk2, "conv2.bias": db2}


def mean_frames(features: np.ndarray) -> np.ndarray:
    """
    Element-wise mean over frames (rows), independent of frame order.

    Values are sorted per column before a float64 summation.
    """
    if features.shape[0] == 0:
        raise EmptyFrameList("cannot average zero frames")
    total = np.sort(features, axis=0).sum(axis=0, dtype=np.float64)
    return (total / features.shape[0]).astype(features.dtype)


def head_forward(
    pooled: np.ndarray, params: dict[str, np.ndarray]
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray]]:
    """FC(ReLU) then FC to class logits."""
    hidden_pre = dense_forward(pooled, params["fc1.weight"], params["fc1.bias"])
    logits = dense_forward(relu(hidden_pre), params["fc2.weight"], params["fc2.bias"])
    return logits, (pooled, hidden_pre)


def head_backward(
    dlogits: np.ndarray, cache: tuple[np.ndarray, np.ndarray], params: dict[str, np.ndarray]
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    pooled, hidden_pre = cache
    dhidden, dw2, db2 = dense_backward(dlogits, relu(hidden_pre), params["fc2.weight"])
    dpooled, dw1, db1 = dense_backward(
        relu_backward(dhidden, hidden_pre), pooled, params["fc1.weight"]
    )
    return dpooled, {"fc1.weight": dw1, "fc1.bias": db1, "fc2.weight": dw2, "fc2.bias": db2}


def cnn_forward(
    x: np.ndarray, params: dict[str, np.ndarray], cfg: CnnConfig
) -> tuple[np.ndarray, np.ndarray]:
    """
    Classify one (C, F, T) input.

    Returns:
        (logits (2,), flattened features (D,))
    """
    features, _ = extract_features(x[None], params, cfg)
    logits, _ = head_forward(features, params)
    return logits[0], features[0]


def frame_features(
    frames: np.ndarray, params: dict[str, np.ndarray], cfg: CnnConfig
) -> np.ndarray:
    """Per-frame feature vectors (n_frames, D), each frame processed on its own."""
    if frames.shape[0] == 0:
        raise EmptyFrameList("frame list is empty")
    return np.concatenate([extract_features(frame[None], params, cfg)[0] for frame in frames])


def cnn_frames_forward(
    frames: np.ndarray, params: dict[str, np.ndarray], cfg: CnnConfig
) -> np.ndarray:
    """Logits (2,) from the mean of per-frame features."""
    pooled = mean_frames(frame_features(frames, params, cfg))
    logits, _ = head_forward(pooled[None], params)
    return logits[0]


@dataclass
class CnnCache:
    counts: np.ndarray
    features: FeatureCache
    head: tuple[np.ndarray, np.ndarray]


class CnnNetwork(Network, kind=ModelKind.CNN):
    """Two conv blocks, frame mean, two dense layers."""

    def build(self, rng: np.random.Generator) -> None:
        for name, value in init_conv_params(self.cfg, rng, self.dtype).items():
            self.register_parameter(name, value)
        head = init_head_params(
            self.cfg.feature_dim, self.cfg.fc_hidden, self.cfg.n_classes, rng, self.dtype
        )
        for name, value in head.items():
            self.register_parameter(name, value)

    def forward(
        self, batch: Sequence[np.ndarray], per_frame: bool = False
    ) -> tuple[np.ndarray, Any]:
        samples = self.prepare(batch)
        if per_frame:
            pooled = np.stack([mean_frames(frame_features(s, self.params, self.cfg)) for s in samples])
            logits, _ = head_forward(pooled, self.params)
            return logits, None

        counts = np.array([len(s) for s in samples])
        features, feature_cache = extract_features(np.concatenate(samples), self.params, self.cfg)
        splits = np.split(features, np.cumsum(counts)[:-1])
        pooled = np.stack([mean_frames(part) for part in splits])
        logits, head_cache = head_forward(pooled, self.params)
        return logits, CnnCache(counts=counts, features=feature_cache, head=head_cache)

    def backward(self, cache: CnnCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        dpooled, grads = head_backward(dlogits, cache.head, self.params)
        scaled = dpooled / cache.counts[:, None].astype(self.dtype)
        dfeatures = np.repeat(scaled, cache.counts, axis=0)
        grads.update(extract_features_backward(dfeatures, cache.features, self.params, self.cfg))
        return grads
