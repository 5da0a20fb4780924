"""Adam optimizer."""

from dataclasses import dataclass, field

import numpy as np

from src.errors import ShapeMismatch


@dataclass
class AdamState:
    """First/second moment estimates (float64) and the step counter."""

    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0


def adam_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> tuple[dict[str, np.ndarray], AdamState]:
    """
    One bias-corrected Adam update, applied in place to ``params``.

    Parameters without a gradient are left untouched.
    """
    state.t += 1
    correction1 = 1.0 - beta1**state.t
    correction2 = 1.0 - beta2**state.t
    for name, grad in grads.items():
        g = np.asarray(grad, dtype=np.float64)
        if g.shape != np.shape(params[name]):
            raise ShapeMismatch(f"{name}: gradient {g.shape} != parameter {np.shape(params[name])}")
        if name not in state.m:
            state.m[name] = np.zeros_like(g)
            state.v[name] = np.zeros_like(g)
        m = state.m[name]
        v = state.v[name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        step = lr * (m / correction1) / (np.sqrt(v / correction2) + eps)
        param = params[name]
        params[name] = (param.astype(np.float64) - step).astype(param.dtype)
    return params, state
