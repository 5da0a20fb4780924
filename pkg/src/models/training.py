"""Training, cross-validation and evaluation models."""

from enum import Enum
from typing import Any

from pydantic import BaseModel, Field, model_validator

from src.models.telemetry import Group


class ExperimentPair(str, Enum):
    """Binary discrimination experiments (positive vs negative)."""

    AD_CTL = "ad-ctl"
    PD_CTL = "pd-ctl"
    PD_PDM = "pd-pdm"

    @property
    def positive(self) -> Group:
        return {"ad-ctl": Group.AD, "pd-ctl": Group.PD, "pd-pdm": Group.PD}[self.value]

    @property
    def negative(self) -> Group:
        return {"ad-ctl": Group.CTL, "pd-ctl": Group.CTL, "pd-pdm": Group.PDM}[self.value]

    @property
    def groups(self) -> set[Group]:
        return {self.positive, self.negative}

    def label(self, group: Group) -> int:
        """1 for the disease group, 0 for the comparison group."""
        if group == self.positive:
            return 1
        if group == self.negative:
            return 0
        raise ValueError(f"group {group.value} is not part of {self.value}")

    @property
    def best_channels(self) -> tuple[str, ...]:
        """Preferred spectrogram channel set for this pair."""
        return PAIR_BEST_CHANNELS[self]


PAIR_BEST_CHANNELS: dict[ExperimentPair, tuple[str, ...]] = {
    ExperimentPair.AD_CTL: ("vx", "vy", "p"),
    ExperimentPair.PD_CTL: ("acc", "vx", "vy", "p"),
    ExperimentPair.PD_PDM: ("traj", "vx", "vy", "p"),
}

DEFAULT_CHANNELS: tuple[str, ...] = ("speed", "vx", "vy", "p")


class ReduceMode(str, Enum):
    """How a plateau reduces the learning rate."""

    MULTIPLY = "multiply"  # lr * factor
    SUBTRACT = "subtract"  # lr * (1 - factor)


class TrainPolicy(BaseModel):
    """Optimizer, scheduler and stopping rules."""

    model_config = {"frozen": True}

    lr: float = Field(default=0.001, gt=0)
    beta1: float = Field(default=0.9, ge=0, lt=1)
    beta2: float = Field(default=0.999, ge=0, lt=1)
    eps: float = Field(default=1e-8, gt=0)
    reduce_factor: float = Field(default=0.2, gt=0, lt=1)
    reduce_mode: ReduceMode = ReduceMode.MULTIPLY
    sched_patience: int = Field(default=3, ge=1)
    stop_patience: int = Field(default=10, ge=1)
    min_delta: float = Field(default=1e-4, ge=0)
    max_epochs: int = Field(default=100, ge=1)
    batch_size: int = Field(default=16, ge=1)

    @property
    def lr_multiplier(self) -> float:
        if self.reduce_mode == ReduceMode.MULTIPLY:
            return self.reduce_factor
        return 1.0 - self.reduce_factor


class FoldSplit(BaseModel):
    """Subject sets for one cross-validation iteration."""

    fold: int
    train: frozenset[str]
    val: frozenset[str]
    test: frozenset[str]

    @model_validator(mode="after")
    def check_disjoint(self) -> "FoldSplit":
        """No subject in more than one role."""
        if self.train & self.val or self.train & self.test or self.val & self.test:
            raise ValueError(f"fold {self.fold}: subject sets overlap")
        return self


class FoldPlan(BaseModel):
    """Disjoint subject folds and their rotation."""

    folds: list[list[str]]
    seed: int

    @model_validator(mode="after")
    def check_partition(self) -> "FoldPlan":
        """Every subject in exactly one fold."""
        flat = [s for fold in self.folds for s in fold]
        if len(flat) != len(set(flat)):
            raise ValueError("a subject appears in more than one fold")
        return self

    @property
    def k(self) -> int:
        return len(self.folds)

    @property
    def subjects(self) -> set[str]:
        return {s for fold in self.folds for s in fold}

    def split(self, test_fold: int) -> FoldSplit:
        """Test fold k, validation fold (k+1) mod K, training = the rest."""
        val_fold = (test_fold + 1) % self.k
        train = {
            s for i, fold in enumerate(self.folds) if i not in (test_fold, val_fold) for s in fold
        }
        return FoldSplit(
            fold=test_fold,
            train=frozenset(train),
            val=frozenset(self.folds[val_fold]),
            test=frozenset(self.folds[test_fold]),
        )

    def splits(self) -> list[FoldSplit]:
        return [self.split(k) for k in range(self.k)]


class EpochRecord(BaseModel):
    """One row of a training curve."""

    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    lr: float
    improved: bool = False


class TrainingCurve(BaseModel):
    """Per-epoch history of one training run."""

    epochs: list[EpochRecord] = Field(default_factory=list)
    best_epoch: int = 0
    stopped_early: bool = False
    scheduler_firings: int = 0


class ConfusionCounts(BaseModel):
    """Binary confusion counts (positive = disease group)."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def n(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            tn=self.tn + other.tn,
            fn=self.fn + other.fn,
        )


class MetricSet(BaseModel):
    """Classification metrics in percent; ``None`` where undefined."""

    accuracy: float | None
    precision: float | None
    recall: float | None
    f1: float | None
    auc: float | None
    confusion: ConfusionCounts
    n_samples: int


class FoldReport(BaseModel):
    """Metrics of one test fold."""

    fold: int
    metrics: MetricSet
    n_train: int
    n_val: int
    n_test: int
    best_epoch: int
    epochs_run: int


class RunMetadata(BaseModel):
    """What is needed to reproduce a report bit for bit."""

    seed: int
    config_hash: str
    code_version: str
    pair: str
    pipeline: str
    model: str
    channels: list[str]
    window: str | None = None
    task_filter: str | None = None
    network: dict[str, Any] = Field(default_factory=dict)


class EvalReport(BaseModel):
    """Cross-validated evaluation of one configuration."""

    label: str
    metadata: RunMetadata
    pooled: MetricSet
    folds: list[FoldReport] = Field(default_factory=list)
    fold_mean: dict[str, float | None] = Field(default_factory=dict)
    best: bool = False
