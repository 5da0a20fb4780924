"""Finite-difference verification of analytic gradients."""

from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel

from src.errors import ConfigError
from src.micronet.base import Network
from src.utils.logging import get_logger

logger = get_logger(__name__)


class GradCheckResult(BaseModel):
    max_relative_error: float
    n_checked: int
    n_skipped: int
    worst_parameter: str | None = None


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


def grad_check(
    network: Network,
    batch: Sequence[np.ndarray],
    labels: Sequence[int],
    n_params: int = 100,
    step: float = 1e-3,
    seed: int = 0,
    kink_tolerance: float = 1e-4,
) -> GradCheckResult:
    """
    Compare backprop gradients against central differences on random parameter entries.

    An entry whose central difference changes when the step is halved sits on a ReLU
    or max-pool switch inside the probe interval; it is skipped and another is drawn.

    Args:
        network: a float64 network
        batch, labels: inputs the loss is evaluated on
        n_params: number of entries to compare
        step: finite-difference step
        seed: selects the entries
        kink_tolerance: relative disagreement that marks a non-smooth entry
    """
    if network.dtype != np.float64:
        raise ConfigError("gradient check needs a float64 network")

    _, grads = network.loss_and_grads(batch, labels)
    rng = np.random.default_rng(seed)
    candidates = [
        (name, flat) for name, value in network.params.items() for flat in range(value.size)
    ]
    order = rng.permutation(len(candidates))

    def central(name: str, index: tuple[int, ...], h: float) -> float:
        param = network.params[name]
        original = param[index]
        param[index] = original + h
        plus = network.loss(batch, labels)
        param[index] = original - h
        minus = network.loss(batch, labels)
        param[index] = original
        return (plus - minus) / (2.0 * h)

    worst, worst_name, checked, skipped = 0.0, None, 0, 0
    for position in order:
        if checked >= n_params:
            break
        name, flat = candidates[position]
        index = np.unravel_index(flat, network.params[name].shape)
        numeric = central(name, index, step)
        refined = central(name, index, step / 2)
        if relative_error(refined, numeric) > kink_tolerance and abs(refined - numeric) > 1e-9:
            skipped += 1
            continue
        error = relative_error(float(grads[name][index]), numeric)
        checked += 1
        if error > worst:
            worst, worst_name = error, name

    logger.info(
        "grad_check_done", max_relative_error=worst, checked=checked, skipped=skipped, worst=worst_name
    )
    return GradCheckResult(
        max_relative_error=worst, n_checked=checked, n_skipped=skipped, worst_parameter=worst_name
    )
