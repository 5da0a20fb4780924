"""Synthetic cohorts with class-conditional handwriting signatures.

Base motion is drawn in velocity space from cubic splines through random control
points; tremor and speed changes are applied to velocity and then integrated, so the
derived-channel code recovers them by differencing. Every random draw comes from a
stream derived from (seed, subject index, task index, purpose); the base stream does
not depend on the subject's group.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import lfilter

from src.errors import DataIoError
from src.models.cohort import ClassSignature, CohortSpec
from src.models.telemetry import Group, Manifest, ManifestEntry, Recording, Task, TaskGroup
from src.telemetry.loader import cohort_summary, write_manifest, write_recording
from src.utils.logging import get_logger
from src.utils.seeding import derive_rng

logger = get_logger(__name__)

GROUP_ORDER = (Group.CTL, Group.PD, Group.PDM, Group.AD)
CONTROL_SPACING_S = 0.75
WRITING_SPEED = 40.0
POINT_SPEED = 6.0
POSITION_NOISE = 0.01
BASE_PRESSURE = 0.5
# AR(1) coefficient of the AD pressure walk.
WALK_LEAK = 0.99

_BASE, _SIGNATURE = 0, 1


@dataclass(frozen=True)
class SubjectPlan:
    index: int
    subject_id: str
    group: Group


def subject_plan(spec: CohortSpec) -> list[SubjectPlan]:
    """Subjects in group order, ids like ``PD007``."""
    plans = []
    for group in GROUP_ORDER:
        for number in range(1, spec.group_counts.get(group, 0) + 1):
            plans.append(SubjectPlan(len(plans), f"{group.value}{number:03d}", group))
    return plans


def _smooth(rng: np.random.Generator, t: np.ndarray, scale: float) -> np.ndarray:
    """Cubic spline through N(0, scale) control values spaced about 0.75 s apart."""
    duration = float(t[-1]) if t.size > 1 else 0.0
    n_knots = max(4, int(duration / CONTROL_SPACING_S) + 2)
    knots = np.linspace(0.0, max(duration, 1e-3), n_knots)
    return CubicSpline(knots, rng.normal(0.0, scale, n_knots))(t)


def _tremor(
    rng: np.random.Generator, t: np.ndarray, amplitude: float, band: tuple[float, float]
) -> tuple[np.ndarray, np.ndarray]:
    freq = rng.uniform(*band)
    phase_x, phase_y = rng.uniform(0.0, 2.0 * np.pi, 2)
    arg = 2.0 * np.pi * freq * t
    return amplitude * np.sin(arg + phase_x), amplitude * np.sin(arg + phase_y)


def synthesize_recording(
    spec: CohortSpec, plan: SubjectPlan, task_index: int, task: Task
) -> Recording:
    """One recording; deterministic in (spec.seed, subject index, task index)."""
    base_rng = derive_rng(spec.seed, plan.index, task_index, _BASE)
    sig_rng = derive_rng(spec.seed, plan.index, task_index, _SIGNATURE)
    fs = spec.sample_rate_hz

    duration = base_rng.uniform(*spec.duration_s)
    n = max(2, int(round(duration * fs)))
    t = np.arange(n) / fs
    speed = POINT_SPEED if task in TaskGroup.POINT.tasks else WRITING_SPEED
    vx = _smooth(base_rng, t, speed)
    vy = _smooth(base_rng, t, speed)
    p = BASE_PRESSURE + 0.1 * np.tanh(_smooth(base_rng, t, 1.0))
    origin = base_rng.uniform(0.0, 100.0, 2)
    noise = base_rng.normal(0.0, POSITION_NOISE, (2, n))

    vx, vy, p = apply_signature(plan.group, spec.signature, spec.amplitude, sig_rng, t, vx, vy, p)

    x = origin[0] + np.cumsum(vx) / fs + noise[0]
    y = origin[1] + np.cumsum(vy) / fs + noise[1]
    return Recording(
        subject_id=plan.subject_id,
        group=plan.group,
        task=task,
        t=t,
        x=x,
        y=y,
        p=np.clip(p, 0.0, None),
        sample_rate_hz=fs,
    )


def apply_signature(
    group: Group,
    signature: ClassSignature,
    amplitude: float,
    rng: np.random.Generator,
    t: np.ndarray,
    vx: np.ndarray,
    vy: np.ndarray,
    p: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Superimpose the group's signature scaled by ``amplitude``; CTL is unchanged."""
    if group == Group.PD:
        tx, ty = _tremor(rng, t, amplitude * signature.pd_tremor_amplitude, signature.pd_tremor_band_hz)
        return vx + tx, vy + ty, p
    if group == Group.PDM:
        tx, ty = _tremor(
            rng, t, amplitude * signature.pdm_tremor_amplitude, signature.pdm_tremor_band_hz
        )
        return vx + tx, vy + ty, p
    if group == Group.AD:
        keep = 1.0 - min(0.95, amplitude * signature.ad_speed_reduction)
        steps = rng.normal(0.0, amplitude * signature.ad_pressure_walk_std, t.size)
        walk = lfilter([1.0], [1.0, -WALK_LEAK], steps)
        return vx * keep, vy * keep, p + walk
    return vx, vy, p


def generate_cohort(spec: CohortSpec, out_dir: Path, jobs: int = 1) -> Manifest:
    """
    Write recordings under ``out_dir/recordings`` and ``out_dir/manifest.jsonl``.

    Output bytes depend only on ``spec``; ``jobs`` only changes speed.

    Raises:
        DataIoError: output directory cannot be created or written
    """
    out_dir = Path(out_dir)
    recordings_dir = out_dir / "recordings"
    try:
        recordings_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DataIoError(f"cannot create output directory {out_dir}: {exc}") from exc

    plans = subject_plan(spec)
    tasks = list(spec.tasks)

    def build_subject(plan: SubjectPlan) -> list[tuple[ManifestEntry, float]]:
        written = []
        for task_index, task in enumerate(tasks):
            recording = synthesize_recording(spec, plan, task_index, task)
            path = recordings_dir / f"{plan.subject_id}_{task.value}.csv"
            write_recording(path, recording)
            entry = ManifestEntry(
                subject_id=plan.subject_id, group=plan.group, task=task, data_path=path
            )
            written.append((entry, recording.duration_s))
        return written

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_subject = list(pool.map(build_subject, plans))
    else:
        per_subject = [build_subject(plan) for plan in plans]

    rows = [item for subject in per_subject for item in subject]
    entries = [entry for entry, _ in rows]
    manifest_path = out_dir / "manifest.jsonl"
    write_manifest(manifest_path, entries)

    logger.info(
        "cohort_generated",
        manifest=str(manifest_path),
        subjects=len(plans),
        files=len(entries),
        amplitude=spec.amplitude,
        summary=cohort_summary(entries, [d for _, d in rows]).to_dict(orient="index"),
    )
    return Manifest(entries=entries, source=manifest_path)
