"""Kinematic channel derivation."""

import numpy as np

from src.errors import DegenerateTime, TooShort
from src.models.telemetry import ChannelSet, Recording


def collapse_duplicate_times(recording: Recording) -> tuple[np.ndarray, ...]:
    """Drop every sample whose timestamp equals its predecessor's (first one wins)."""
    t = recording.t
    keep = np.ones(t.shape[0], dtype=bool)
    keep[1:] = np.diff(t) != 0
    return t[keep], recording.x[keep], recording.y[keep], recording.p[keep]


def derive_channels(rec: Recording) -> ChannelSet:
    """
    Derive position, pressure, velocity, speed, trajectory and acceleration channels.

    All channels live on the n-1 grid of first differences; x, y and p drop their first
    sample to align with it.

    Args:
        rec: A loaded recording

    Returns:
        ChannelSet with channels x, y, p, vx, vy, speed, traj, acc

    Raises:
        TooShort: fewer than two samples
        DegenerateTime: a single distinct timestamp remains after collapsing
    """
    if len(rec) < 2:
        raise TooShort(f"{rec.subject_id}/{rec.task.value}: need at least 2 samples")

    t, x, y, p = collapse_duplicate_times(rec)
    if t.shape[0] < 2:
        raise DegenerateTime(f"{rec.subject_id}/{rec.task.value}: all timestamps are equal")

    dt = np.diff(t)
    dx = np.diff(x)
    dy = np.diff(y)

    vx = dx / dt
    vy = dy / dt
    speed = np.sqrt(vx * vx + vy * vy)
    traj = np.cumsum(np.sqrt(dx * dx + dy * dy))

    acc = np.zeros_like(vx)
    if vx.shape[0] > 1:
        ax = np.diff(vx) / dt[1:]
        ay = np.diff(vy) / dt[1:]
        acc[1:] = np.sqrt(ax * ax + ay * ay)
        acc[0] = acc[1]

    return ChannelSet(
        channels={
            "x": x[1:].copy(),
            "y": y[1:].copy(),
            "p": p[1:].copy(),
            "vx": vx,
            "vy": vy,
            "speed": speed,
            "traj": traj,
            "acc": acc,
        },
        dt=float(np.median(dt)),
    )
