"""Data models for the handwriting analysis pipeline."""

from src.models.cohort import ClassSignature, CohortSpec
from src.models.network import BlstmConfig, CnnConfig, ModelKind, NetworkSpec
from src.models.run import Pipeline, RunConfig
from src.models.spectrogram import (
    FrameStack,
    MultiSpectrogram,
    Spectrogram,
    StftConfig,
    WindowMode,
    WindowSpec,
)
from src.models.telemetry import (
    ChannelSet,
    Group,
    Manifest,
    ManifestEntry,
    PenSample,
    Recording,
    Task,
    TaskGroup,
)
from src.models.training import (
    ConfusionCounts,
    EvalReport,
    ExperimentPair,
    FoldPlan,
    FoldSplit,
    MetricSet,
    TrainingCurve,
    TrainPolicy,
)

__all__ = [
    # Telemetry
    "PenSample",
    "Recording",
    "ChannelSet",
    "Manifest",
    "ManifestEntry",
    "Group",
    "Task",
    "TaskGroup",
    # Spectrogram
    "StftConfig",
    "Spectrogram",
    "MultiSpectrogram",
    "FrameStack",
    "WindowMode",
    "WindowSpec",
    # Network
    "CnnConfig",
    "BlstmConfig",
    "ModelKind",
    "NetworkSpec",
    # Training
    "ExperimentPair",
    "TrainPolicy",
    "FoldPlan",
    "FoldSplit",
    "TrainingCurve",
    "ConfusionCounts",
    "MetricSet",
    "EvalReport",
    # Cohort
    "CohortSpec",
    "ClassSignature",
    # Run
    "Pipeline",
    "RunConfig",
]
