"""Binary classification metrics (percent)."""

from collections.abc import Sequence

import numpy as np
from scipy.stats import rankdata

from src.errors import EmptyTestSet
from src.models.training import ConfusionCounts, MetricSet

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "auc")


def confusion(labels: np.ndarray, predictions: np.ndarray) -> ConfusionCounts:
    labels = np.asarray(labels).astype(bool)
    predictions = np.asarray(predictions).astype(bool)
    return ConfusionCounts(
        tp=int(np.sum(labels & predictions)),
        fp=int(np.sum(~labels & predictions)),
        tn=int(np.sum(~labels & ~predictions)),
        fn=int(np.sum(labels & ~predictions)),
    )


def _ratio(num: int, den: int) -> float | None:
    return 100.0 * num / den if den else None


def f1_from(precision: float | None, recall: float | None) -> float | None:
    """Harmonic mean of precision and recall (same unit as the inputs)."""
    if precision is None or recall is None or precision + recall == 0:
        return None
    return 2.0 * precision * recall / (precision + recall)


def auc_rank(labels: np.ndarray, scores: np.ndarray) -> float | None:
    """
    ROC AUC in percent via the Mann-Whitney rank statistic.

    Tied scores share their average rank, so all-equal scores give 50. ``None`` when
    only one class is present.
    """
    labels = np.asarray(labels).astype(bool)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(np.asarray(scores, dtype=np.float64), method="average")
    u = ranks[labels].sum(dtype=np.float64) - n_pos * (n_pos + 1) / 2.0
    return 100.0 * u / (n_pos * n_neg)


def metrics_from_confusion(counts: ConfusionCounts, auc: float | None = None) -> MetricSet:
    if counts.n == 0:
        raise EmptyTestSet("no samples to score")
    precision = _ratio(counts.tp, counts.tp + counts.fp)
    recall = _ratio(counts.tp, counts.tp + counts.fn)
    return MetricSet(
        accuracy=_ratio(counts.tp + counts.tn, counts.n),
        precision=precision,
        recall=recall,
        f1=f1_from(precision, recall),
        auc=auc,
        confusion=counts,
        n_samples=counts.n,
    )


def compute_metrics(labels: np.ndarray, scores: np.ndarray) -> MetricSet:
    """
    Metrics for positive-class scores; the decision is argmax of two-class softmax.

    Args:
        labels: 1 for the disease group, 0 for the comparison group
        scores: positive-class probabilities
    """
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.size == 0:
        raise EmptyTestSet("no samples to score")
    predictions = scores > 0.5
    return metrics_from_confusion(confusion(labels, predictions), auc_rank(labels, scores))


def fold_mean(metric_sets: Sequence[MetricSet]) -> dict[str, float | None]:
    """Unweighted mean of each metric over folds, skipping undefined values."""
    means: dict[str, float | None] = {}
    for name in METRIC_NAMES:
        values = [getattr(m, name) for m in metric_sets if getattr(m, name) is not None]
        means[name] = float(np.mean(values)) if values else None
    return means
