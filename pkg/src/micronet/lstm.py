"""Unidirectional and bidirectional LSTM over one sequence, with backward passes.

Gate order in the packed weights is input, forget, cell, output. A direction holds
``W`` (D_in, 4H), ``U`` (H, 4H) and ``b`` (4H,); initial hidden and cell states are zero.
"""

from dataclasses import dataclass

import numpy as np

from src.errors import EmptySequence, ShapeMismatch
from src.micronet.ops import sigmoid


@dataclass
class LstmCache:
    x: np.ndarray
    order: np.ndarray
    gates: np.ndarray  # (T, 4H) activated gates in time order
    cells: np.ndarray  # (T, H)
    prev_h: np.ndarray  # (T, H) hidden state entering each step
    prev_c: np.ndarray  # (T, H)


def lstm_forward(
    x: np.ndarray, W: np.ndarray, U: np.ndarray, b: np.ndarray, reverse: bool = False
) -> tuple[np.ndarray, LstmCache]:
    """
    Run one direction over ``x`` (T, D_in).

    Returns:
        hidden states (T, H) indexed by input time step, plus the backward cache
    """
    if x.ndim != 2 or x.shape[0] == 0:
        raise EmptySequence(f"LSTM input must be a non-empty (T, D) array, got {x.shape}")
    if x.shape[1] != W.shape[0]:
        raise ShapeMismatch(f"LSTM input dim {x.shape[1]} != weight rows {W.shape[0]}")

    steps, hidden = x.shape[0], U.shape[0]
    projected = x @ W + b
    order = np.arange(steps)[::-1] if reverse else np.arange(steps)

    gates = np.empty((steps, 4 * hidden), dtype=projected.dtype)
    cells = np.empty((steps, hidden), dtype=projected.dtype)
    hs = np.empty((steps, hidden), dtype=projected.dtype)
    prev_h = np.empty_like(hs)
    prev_c = np.empty_like(cells)

    h = np.zeros(hidden, dtype=projected.dtype)
    c = np.zeros(hidden, dtype=projected.dtype)
    for t in order:
        z = projected[t] + h @ U
        i = sigmoid(z[:hidden])
        f = sigmoid(z[hidden : 2 * hidden])
        g = np.tanh(z[2 * hidden : 3 * hidden])
        o = sigmoid(z[3 * hidden :])
        prev_h[t], prev_c[t] = h, c
        c = f * c + i * g
        h = o * np.tanh(c)
        gates[t] = np.concatenate([i, f, g, o])
        cells[t], hs[t] = c, h

    return hs, LstmCache(x=x, order=order, gates=gates, cells=cells, prev_h=prev_h, prev_c=prev_c)


def lstm_backward(
    dhs: np.ndarray, cache: LstmCache, W: np.ndarray, U: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Backpropagation through time. Returns (dx, dW, dU, db)."""
    steps, hidden = dhs.shape
    dprojected = np.empty((steps, 4 * hidden), dtype=dhs.dtype)
    dU = np.zeros_like(U)
    dh_next = np.zeros(hidden, dtype=dhs.dtype)
    dc_next = np.zeros(hidden, dtype=dhs.dtype)

    for t in cache.order[::-1]:
        gates = cache.gates[t]
        i, f = gates[:hidden], gates[hidden : 2 * hidden]
        g, o = gates[2 * hidden : 3 * hidden], gates[3 * hidden :]
        tanh_c = np.tanh(cache.cells[t])

        dh = dhs[t] + dh_next
        do = dh * tanh_c
        dc = dc_next + dh * o * (1.0 - tanh_c**2)
        di = dc * g
        dg = dc * i
        df = dc * cache.prev_c[t]
        dc_next = dc * f

        dz = np.concatenate(
            [di * i * (1.0 - i), df * f * (1.0 - f), dg * (1.0 - g**2), do * o * (1.0 - o)]
        )
        dprojected[t] = dz
        dU += np.outer(cache.prev_h[t], dz)
        dh_next = dz @ U.T

    dW = cache.x.T @ dprojected
    db = dprojected.sum(axis=0, dtype=np.float64).astype(dhs.dtype)
    dx = dprojected @ W.T
    return dx, dW, dU, db


def lstm_param_names(layer: int, direction: str) -> tuple[str, str, str]:
    prefix = f"blstm.l{layer}.{direction}"
    return f"{prefix}.W", f"{prefix}.U", f"{prefix}.b"


@dataclass
class BlstmCache:
    layers: list[tuple[LstmCache, LstmCache]]


def blstm_stack_forward(
    x: np.ndarray, params: dict[str, np.ndarray], layers: int
) -> tuple[np.ndarray, BlstmCache]:
    """Stacked bidirectional LSTM; each layer concatenates (forward, backward) states."""
    caches = []
    out = x
    for layer in range(layers):
        fwd = lstm_param_names(layer, "fwd")
        bwd = lstm_param_names(layer, "bwd")
        h_f, c_f = lstm_forward(out, *(params[n] for n in fwd), reverse=False)
        h_b, c_b = lstm_forward(out, *(params[n] for n in bwd), reverse=True)
        out = np.concatenate([h_f, h_b], axis=1)
        caches.append((c_f, c_b))
    return out, BlstmCache(layers=caches)


def blstm_stack_backward(
    dout: np.ndarray, cache: BlstmCache, params: dict[str, np.ndarray]
) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Gradients of ``blstm_stack_forward``. Returns (dx, parameter grads)."""
    grads: dict[str, np.ndarray] = {}
    for layer in reversed(range(len(cache.layers))):
        c_f, c_b = cache.layers[layer]
        hidden = dout.shape[1] // 2
        dx = None
        for direction, sub_cache, dslice in (
            ("fwd", c_f, dout[:, :hidden]),
            ("bwd", c_b, dout[:, hidden:]),
        ):
            w_name, u_name, b_name = lstm_param_names(layer, direction)
            dx_dir, dW, dU, db = lstm_backward(
                np.ascontiguousarray(dslice), sub_cache, params[w_name], params[u_name]
            )
            grads[w_name], grads[u_name], grads[b_name] = dW, dU, db
            dx = dx_dir if dx is None else dx + dx_dir
        dout = dx
    return dout, grads
