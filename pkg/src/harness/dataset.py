"""Turning a manifest into network-ready samples."""

from collections import Counter
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from src.dsp.framing import fit_fixed_size, frame_decompose
from src.dsp.stft import build_multispectrogram, normalize_channels
from src.errors import DataError, EmptyManifest, EmptyTaskSubset, RecordingValidationError
from src.models.run import FIXED_COLUMNS, Pipeline, RunConfig
from src.models.spectrogram import MultiSpectrogram, StftConfig
from src.models.telemetry import Group, Manifest, ManifestEntry, Task
from src.state.manager import CacheManager
from src.telemetry.channels import derive_channels
from src.telemetry.loader import load_entry
from src.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Sample:
    """One recording as network input: a stack of (C, F, W) frames plus its label."""

    subject_id: str
    group: Group
    task: Task
    label: int
    frames: np.ndarray
    source: str

    @property
    def n_frames(self) -> int:
        return int(self.frames.shape[0])


def entry_spectrogram(
    entry: ManifestEntry,
    channels: Sequence[str],
    stft: StftConfig,
    cache: CacheManager | None = None,
) -> MultiSpectrogram:
    """Multi-spectrogram of one recording, read from or written to the cache."""
    key = cache.key(entry.data_path, tuple(channels), stft) if cache is not None else None
    if cache is not None and key is not None:
        cached = cache.get(key, stft.column_duration_s)
        if cached is not None:
            return cached
    ms = build_multispectrogram(derive_channels(load_entry(entry)), channels, stft)
    if cache is not None and key is not None:
        cache.set(key, ms)
    return ms


def to_frames(ms: MultiSpectrogram, config: RunConfig) -> np.ndarray:
    """Network input stack (n_frames, C, F, W) for the configured pipeline."""
    if config.normalize:
        ms = normalize_channels(ms)
    if config.pipeline == Pipeline.FIXED:
        return fit_fixed_size(ms, FIXED_COLUMNS).values[None]
    assert config.window is not None
    return frame_decompose(ms, config.window).frames


def select_entries(manifest: Manifest, config: RunConfig) -> Manifest:
    """Recordings of the pair's two groups, restricted by the task filter."""
    tasks = config.task_filter
    selected = manifest.filter(
        groups=config.pair.groups, tasks=set(tasks) if tasks is not None else None
    )
    if len(selected) == 0:
        raise EmptyTaskSubset(
            f"no recordings for pair {config.pair.value} with task filter {config.task!r}"
        )
    return selected


def load_spectrograms(
    manifest: Manifest,
    config: RunConfig,
    cache: CacheManager | None = None,
    jobs: int = 1,
) -> list[tuple[ManifestEntry, MultiSpectrogram]]:
    """
    Multi-spectrograms of every selected recording, in manifest order.

    Args:
        manifest: Validated manifest
        config: Run configuration (pair, channels, STFT settings, task filter)
        cache: Optional spectrogram cache
        jobs: Worker threads for spectrogram computation

    Raises:
        EmptyTaskSubset: nothing left after filtering
    """
    entries = select_entries(manifest, config).entries

    def build(entry: ManifestEntry) -> tuple[ManifestEntry, MultiSpectrogram]:
        return entry, entry_spectrogram(entry, config.channels, config.stft, cache)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(build, entries))
    return [build(entry) for entry in entries]


def make_samples(
    spectrograms: Sequence[tuple[ManifestEntry, MultiSpectrogram]], config: RunConfig
) -> list[Sample]:
    """Frame already computed spectrograms for ``config``'s pipeline and task filter."""
    tasks = config.task_filter
    samples = [
        Sample(
            subject_id=entry.subject_id,
            group=entry.group,
            task=entry.task,
            label=config.pair.label(entry.group),
            frames=np.ascontiguousarray(to_frames(ms, config), dtype=np.float32),
            source=str(entry.data_path),
        )
        for entry, ms in spectrograms
        if entry.group in config.pair.groups and (tasks is None or entry.task in tasks)
    ]
    if not samples:
        raise EmptyTaskSubset(
            f"no recordings for pair {config.pair.value} with task filter {config.task!r}"
        )
    logger.info(
        "samples_ready",
        pair=config.pair.value,
        task=config.task,
        n_samples=len(samples),
        n_subjects=len({s.subject_id for s in samples}),
        per_group=dict(sorted(Counter(s.group.value for s in samples).items())),
        frame_shape=list(samples[0].frames.shape[1:]),
    )
    return samples


def load_samples(
    manifest: Manifest,
    config: RunConfig,
    cache: CacheManager | None = None,
    jobs: int = 1,
) -> list[Sample]:
    """Spectrograms plus framing in one step."""
    return make_samples(load_spectrograms(manifest, config, cache, jobs), config)


def stack_batch(samples: Sequence[Sample]) -> tuple[list[np.ndarray], np.ndarray]:
    """Network batch (list of frame stacks) and the label vector."""
    return [s.frames for s in samples], np.array([s.label for s in samples], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Preprocessed:
    entry: ManifestEntry
    spectrogram: MultiSpectrogram
    duration_s: float


def preprocess_manifest(
    manifest: Manifest,
    channels: Sequence[str],
    stft: StftConfig,
    cache: CacheManager | None = None,
    jobs: int = 1,
) -> list[Preprocessed]:
    """
    Validate every recording and fill the spectrogram cache.

    Raises:
        EmptyManifest: no entries
        RecordingValidationError: one or more recordings failed; lists all of them
    """
    if len(manifest) == 0:
        raise EmptyManifest("manifest has no entries")

    def build(entry: ManifestEntry) -> Preprocessed | tuple[str, str]:
        try:
            recording = load_entry(entry)
            derived = derive_channels(recording)
            key = cache.key(entry.data_path, tuple(channels), stft) if cache is not None else None
            ms = cache.get(key, stft.column_duration_s) if cache is not None and key else None
            if ms is None:
                ms = build_multispectrogram(derived, channels, stft)
                if cache is not None and key is not None:
                    cache.set(key, ms)
        except DataError as exc:
            return str(entry.data_path), str(exc)
        return Preprocessed(entry=entry, spectrogram=ms, duration_s=recording.duration_s)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(build, manifest.entries))
    else:
        results = [build(entry) for entry in manifest.entries]

    offenders = [r for r in results if isinstance(r, tuple)]
    if offenders:
        raise RecordingValidationError(offenders)
    return [r for r in results if isinstance(r, Preprocessed)]
