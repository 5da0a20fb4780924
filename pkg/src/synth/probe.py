"""Model-free separability score of an experiment pair on a cohort."""

from collections.abc import Callable, Sequence

import numpy as np
from pydantic import BaseModel
from scipy.signal import welch

from src.models.telemetry import ChannelSet, Manifest
from src.models.training import ExperimentPair
from src.telemetry.channels import derive_channels
from src.telemetry.loader import load_entry
from src.utils.logging import get_logger

logger = get_logger(__name__)

_EPS = 1e-12


class ProbeResult(BaseModel):
    """Standardised mean difference of a pair feature, with its permutation null band."""

    pair: ExperimentPair
    feature: str
    score: float
    null_low: float
    null_high: float
    n_positive: int
    n_negative: int

    @property
    def within_null(self) -> bool:
        return self.null_low <= self.score <= self.null_high


def _band_power(channels: ChannelSet, low: float, high: float) -> tuple[float, float]:
    """Power of vx + vy inside [low, high) Hz and within 0.5-10 Hz."""
    fs = 1.0 / channels.dt
    inside = total = 0.0
    for name in ("vx", "vy"):
        signal = channels[name]
        freqs, power = welch(signal, fs=fs, nperseg=min(256, signal.size))
        inside += float(power[(freqs >= low) & (freqs < high)].sum())
        total += float(power[(freqs >= 0.5) & (freqs < 10.0)].sum())
    return inside, total


def tremor_share(channels: ChannelSet) -> float:
    """log share of 4-6 Hz velocity power."""
    inside, total = _band_power(channels, 4.0, 6.0)
    return float(np.log((inside + _EPS) / (total + _EPS)))


def tremor_band_ratio(channels: ChannelSet) -> float:
    """log ratio of 4-6 Hz to 2-4 Hz velocity power."""
    high, _ = _band_power(channels, 4.0, 6.0)
    low, _ = _band_power(channels, 2.0, 4.0)
    return float(np.log((high + _EPS) / (low + _EPS)))


def pressure_roughness(channels: ChannelSet) -> float:
    """log standard deviation of sample-to-sample pressure changes."""
    return float(np.log(np.std(np.diff(channels["p"])) + _EPS))


PAIR_FEATURES: dict[ExperimentPair, tuple[str, Callable[[ChannelSet], float]]] = {
    ExperimentPair.PD_CTL: ("tremor_share", tremor_share),
    ExperimentPair.PD_PDM: ("tremor_band_ratio", tremor_band_ratio),
    ExperimentPair.AD_CTL: ("pressure_roughness", pressure_roughness),
}


def standardized_difference(values: np.ndarray, labels: np.ndarray) -> float:
    """(mean positive - mean negative) / pooled standard deviation."""
    pos, neg = values[labels == 1], values[labels == 0]
    if pos.size < 2 or neg.size < 2:
        return 0.0
    pooled = np.sqrt(
        ((pos.size - 1) * pos.var(ddof=1) + (neg.size - 1) * neg.var(ddof=1))
        / (pos.size + neg.size - 2)
    )
    if pooled == 0:
        return 0.0
    return float((pos.mean() - neg.mean()) / pooled)


def permutation_band(
    values: np.ndarray, labels: np.ndarray, n_permutations: int, seed: int, level: float = 0.95
) -> tuple[float, float]:
    """Central ``level`` interval of the score under shuffled labels."""
    rng = np.random.default_rng(seed)
    null = np.array(
        [standardized_difference(values, rng.permutation(labels)) for _ in range(n_permutations)]
    )
    tail = (1.0 - level) / 2.0 * 100.0
    low, high = np.percentile(null, [tail, 100.0 - tail])
    return float(low), float(high)


def feature_values(
    manifest: Manifest, pair: ExperimentPair
) -> tuple[str, np.ndarray, np.ndarray]:
    """Per-recording feature and label for the pair's two groups."""
    name, feature = PAIR_FEATURES[pair]
    selected = manifest.filter(groups=pair.groups)
    values = np.array([feature(derive_channels(load_entry(e))) for e in selected.entries])
    labels = np.array([pair.label(e.group) for e in selected.entries], dtype=np.int64)
    return name, values, labels


def separability_probe(
    manifest: Manifest,
    pair: ExperimentPair,
    n_permutations: int = 200,
    seed: int = 0,
    labels: Sequence[int] | None = None,
    level: float = 0.95,
) -> ProbeResult:
    """
    Score how far apart the pair's groups are on a hand-picked spectral feature.

    Args:
        manifest: Cohort to probe
        pair: Experiment pair
        n_permutations: Shuffles for the null band
        seed: Shuffle seed
        labels: Replacement labels (e.g. permuted) in manifest-filter order
        level: Coverage of the null band
    """
    name, values, true_labels = feature_values(manifest, pair)
    used = np.asarray(labels, dtype=np.int64) if labels is not None else true_labels
    score = standardized_difference(values, used)
    low, high = permutation_band(values, used, n_permutations, seed, level)
    result = ProbeResult(
        pair=pair,
        feature=name,
        score=score,
        null_low=low,
        null_high=high,
        n_positive=int((used == 1).sum()),
        n_negative=int((used == 0).sum()),
    )
    logger.info("separability_probe", **result.model_dump(mode="json"))
    return result
