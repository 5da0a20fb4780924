"""Cross-validated training and evaluation of one configuration."""

import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from pydantic import BaseModel

from src import __version__
from src.errors import EmptyTestSet
from src.harness.dataset import Sample, stack_batch
from src.harness.folds import assert_no_leakage, make_folds
from src.harness.metrics import auc_rank, compute_metrics, fold_mean, metrics_from_confusion
from src.harness.trainer import train_model
from src.micronet.base import Network
from src.models.run import RunConfig
from src.models.training import EvalReport, FoldReport, FoldSplit, MetricSet, RunMetadata
from src.utils.logging import ExperimentLogger, get_logger
from src.utils.seeding import derive_seed

logger = get_logger(__name__)


class FoldOutcome(BaseModel):
    """Test-fold predictions and the fold report."""

    report: FoldReport
    labels: list[int]
    scores: list[float]


def evaluate(
    network: Network, samples: Sequence[Sample], batch_size: int = 16
) -> tuple[np.ndarray, np.ndarray, MetricSet]:
    """
    Score ``samples`` with a trained network.

    Returns:
        (labels, positive-class probabilities, metrics)

    Raises:
        EmptyTestSet: no samples
    """
    if not samples:
        raise EmptyTestSet("test set is empty")
    scores = []
    for start in range(0, len(samples), batch_size):
        batch, _ = stack_batch(samples[start : start + batch_size])
        scores.append(network.predict_proba(batch)[:, 1])
    labels = np.array([s.label for s in samples], dtype=np.int64)
    probabilities = np.concatenate(scores)
    return labels, probabilities, compute_metrics(labels, probabilities)


def run_fold(
    split: FoldSplit, samples: Sequence[Sample], config: RunConfig, run_id: str = "run"
) -> FoldOutcome:
    """Train on one split and score its test fold."""
    train = [s for s in samples if s.subject_id in split.train]
    val = [s for s in samples if s.subject_id in split.val]
    test = [s for s in samples if s.subject_id in split.test]
    assert_no_leakage(
        split,
        {
            "train": {s.subject_id for s in train},
            "val": {s.subject_id for s in val},
            "test": {s.subject_id for s in test},
        },
    )
    if not test:
        raise EmptyTestSet(f"fold {split.fold} has no test recordings")

    run_logger = ExperimentLogger(run_id)
    started = time.perf_counter()
    spec = config.network_spec(seed=derive_seed(config.seed, split.fold, 0))
    network, curve = train_model(
        spec,
        train,
        val,
        config.policy,
        seed=derive_seed(config.seed, split.fold, 1),
        run_logger=run_logger,
        fold=split.fold,
    )
    labels, scores, metrics = evaluate(network, test, config.policy.batch_size)
    run_logger.log_fold(
        split.fold,
        duration_ms=(time.perf_counter() - started) * 1000,
        f1=metrics.f1,
        auc=metrics.auc,
        best_epoch=curve.best_epoch,
        epochs=len(curve.epochs),
    )
    report = FoldReport(
        fold=split.fold,
        metrics=metrics,
        n_train=len(train),
        n_val=len(val),
        n_test=len(test),
        best_epoch=curve.best_epoch,
        epochs_run=len(curve.epochs),
    )
    return FoldOutcome(report=report, labels=labels.tolist(), scores=scores.tolist())


_WORKER_SAMPLES: list[Sample] = []


def _init_worker(samples: list[Sample]) -> None:
    global _WORKER_SAMPLES
    _WORKER_SAMPLES = samples


def _run_fold_in_worker(split: FoldSplit, config: RunConfig, run_id: str) -> FoldOutcome:
    return run_fold(split, _WORKER_SAMPLES, config, run_id)


def run_metadata(config: RunConfig) -> RunMetadata:
    """Reproduction block attached to every report."""
    spec = config.network_spec(seed=config.seed)
    return RunMetadata(
        seed=config.seed,
        config_hash=config.config_hash(),
        code_version=__version__,
        pair=config.pair.value,
        pipeline=config.pipeline.value,
        model=config.model.value,
        channels=list(config.channels),
        window=config.window.label if config.window else None,
        task_filter=config.task,
        network={
            "input": list(spec.cnn.shape_trace()[0][1]),
            "shapes": {name: list(shape) for name, shape in spec.cnn.shape_trace()},
            "time_padding": spec.cnn.time_padding,
            "pool_time": list(spec.cnn.pool_time()),
            "blstm": spec.blstm.model_dump() if spec.blstm else None,
        },
    )


def default_label(config: RunConfig) -> str:
    parts = [config.pair.value, config.model.value, config.pipeline.value, ",".join(config.channels)]
    if config.window is not None:
        parts.append(config.window.label)
    if config.task is not None:
        parts.append(config.task)
    return " ".join(parts)


def cross_validate(
    samples: Sequence[Sample],
    config: RunConfig,
    label: str | None = None,
    jobs: int = 1,
) -> EvalReport:
    """
    Subject-grouped k-fold cross-validation.

    Folds run in worker processes when ``jobs`` > 1; results are merged in fold order,
    so the report does not depend on scheduling.

    Raises:
        TooFewSubjects: fewer subjects than folds
    """
    label = label or default_label(config)
    plan = make_folds(((s.subject_id, s.group) for s in samples), config.folds, config.seed)
    splits = plan.splits()
    run_id = config.config_hash()[:12]
    logger.info("cross_validation_started", label=label, folds=plan.k, n_samples=len(samples), jobs=jobs)

    if jobs > 1:
        with ProcessPoolExecutor(
            max_workers=min(jobs, len(splits)),
            initializer=_init_worker,
            initargs=(list(samples),),
        ) as pool:
            futures = [pool.submit(_run_fold_in_worker, split, config, run_id) for split in splits]
            outcomes = [future.result() for future in futures]
    else:
        outcomes = [run_fold(split, samples, config, run_id) for split in splits]
    outcomes.sort(key=lambda o: o.report.fold)

    counts = outcomes[0].report.metrics.confusion
    for outcome in outcomes[1:]:
        counts = counts + outcome.report.metrics.confusion
    labels = np.concatenate([np.asarray(o.labels, dtype=np.int64) for o in outcomes])
    scores = np.concatenate([np.asarray(o.scores, dtype=np.float64) for o in outcomes])
    pooled = metrics_from_confusion(counts, auc_rank(labels, scores))

    logger.info("cross_validation_finished", label=label, f1=pooled.f1, auc=pooled.auc)
    return EvalReport(
        label=label,
        metadata=run_metadata(config),
        pooled=pooled,
        folds=[o.report for o in outcomes],
        fold_mean=fold_mean([o.report.metrics for o in outcomes]),
    )
