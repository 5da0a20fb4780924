"""Forward and backward passes of the layer operators.

Convolution and pooling take a single sample (C, H, W) or a batch (N, C, H, W) and
return the same rank. Convolution kernels are fixed at 3x3 with stride 1 and no padding
on the frequency axis; ``pad_w`` adds zero columns on both ends of the time axis.
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit, log_softmax as _log_softmax

from src.errors import ShapeMismatch

KERNEL = 3


def _as_batch(x: np.ndarray) -> tuple[np.ndarray, bool]:
    if x.ndim == 4:
        return x, True
    if x.ndim == 3:
        return x[None], False
    raise ShapeMismatch(f"expected (C, H, W) or (N, C, H, W), got shape {x.shape}")


def conv2d_forward(
    x: np.ndarray, kernels: np.ndarray, bias: np.ndarray, pad_w: int = 0
) -> np.ndarray:
    """
    Valid 3x3 cross-correlation, stride 1.

    out[k, i, j] = bias[k] + sum_{c, di, dj} x[c, i + di, j + dj] * kernels[k, c, di, dj]
    """
    xb, batched = _as_batch(x)
    n_filters, in_channels, kh, kw = kernels.shape
    if (kh, kw) != (KERNEL, KERNEL):
        raise ShapeMismatch(f"kernels must be 3x3, got {kh}x{kw}")
    if xb.shape[1] != in_channels:
        raise ShapeMismatch(f"input has {xb.shape[1]} channels, kernels expect {in_channels}")
    if bias.shape != (n_filters,):
        raise ShapeMismatch(f"bias shape {bias.shape} does not match {n_filters} filters")
    if xb.shape[2] < KERNEL or xb.shape[3] + 2 * pad_w < KERNEL:
        raise ShapeMismatch(f"input {xb.shape[2:]} too small for a 3x3 valid convolution")

    if pad_w:
        xb = np.pad(xb, ((0, 0), (0, 0), (0, 0), (pad_w, pad_w)), mode="constant")
    windows = sliding_window_view(xb, (KERNEL, KERNEL), axis=(2, 3))
    out = np.tensordot(windows, kernels, axes=([1, 4, 5], [1, 2, 3]))
    out = out.transpose(0, 3, 1, 2) + bias[None, :, None, None]
    out = np.ascontiguousarray(out)
    return out if batched else out[0]


def conv2d_backward(
    dout: np.ndarray,
    x: np.ndarray,
    kernels: np.ndarray,
    pad_w: int = 0,
    need_dx: bool = True,
) -> tuple[np.ndarray | None, np.ndarray, np.ndarray]:
    """Gradients (dx, dkernels, dbias) of ``conv2d_forward``; batch inputs only."""
    xp = np.pad(x, ((0, 0), (0, 0), (0, 0), (pad_w, pad_w)), mode="constant") if pad_w else x
    windows = sliding_window_view(xp, (KERNEL, KERNEL), axis=(2, 3))
    dkernels = np.tensordot(dout, windows, axes=([0, 2, 3], [0, 2, 3]))
    dbias = dout.sum(axis=(0, 2, 3), dtype=np.float64).astype(dout.dtype)

    dx = None
    if need_dx:
        edge = KERNEL - 1
        dpad = np.pad(dout, ((0, 0), (0, 0), (edge, edge), (edge, edge)), mode="constant")
        dwindows = sliding_window_view(dpad, (KERNEL, KERNEL), axis=(2, 3))
        flipped = kernels[:, :, ::-1, ::-1]
        dxp = np.tensordot(dwindows, flipped, axes=([1, 4, 5], [0, 2, 3])).transpose(0, 3, 1, 2)
        dx = np.ascontiguousarray(dxp[:, :, :, pad_w : dxp.shape[3] - pad_w] if pad_w else dxp)
    return dx, np.ascontiguousarray(dkernels), dbias


def maxpool2d(
    x: np.ndarray, pool_h: int = 2, pool_w: int = 2
) -> tuple[np.ndarray, np.ndarray]:
    """
    Non-overlapping max pooling; odd trailing rows/columns are dropped.

    Returns:
        (pooled, argmax) where argmax indexes the flattened pool_h x pool_w block
    """
    xb, batched = _as_batch(x)
    n, k, h, w = xb.shape
    if h < pool_h or w < pool_w:
        raise ShapeMismatch(f"input {h}x{w} smaller than pool window {pool_h}x{pool_w}")
    ho, wo = h // pool_h, w // pool_w
    blocks = (
        xb[:, :, : ho * pool_h, : wo * pool_w]
        .reshape(n, k, ho, pool_h, wo, pool_w)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, k, ho, wo, pool_h * pool_w)
    )
    argmax = blocks.argmax(axis=-1)
    pooled = np.take_along_axis(blocks, argmax[..., None], axis=-1)[..., 0]
    if batched:
        return pooled, argmax
    return pooled[0], argmax[0]


def maxpool2d_backward(
    dout: np.ndarray,
    argmax: np.ndarray,
    input_shape: tuple[int, ...],
    pool_h: int = 2,
    pool_w: int = 2,
) -> np.ndarray:
    """Route pooled gradients back to the max positions; batch inputs only."""
    n, k, h, w = input_shape
    ho, wo = dout.shape[2], dout.shape[3]
    dblocks = np.zeros((n, k, ho, wo, pool_h * pool_w), dtype=dout.dtype)
    np.put_along_axis(dblocks, argmax[..., None], dout[..., None], axis=-1)
    dcrop = (
        dblocks.reshape(n, k, ho, wo, pool_h, pool_w)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, k, ho * pool_h, wo * pool_w)
    )
    dx = np.zeros(input_shape, dtype=dout.dtype)
    dx[:, :, : ho * pool_h, : wo * pool_w] = dcrop
    return dx


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(dout: np.ndarray, x: np.ndarray) -> np.ndarray:
    return dout * (x > 0)


def dense_forward(x: np.ndarray, weight: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """x (N, D_in) @ weight (D_in, D_out) + bias."""
    if x.shape[-1] != weight.shape[0]:
        raise ShapeMismatch(f"dense input dim {x.shape[-1]} != weight rows {weight.shape[0]}")
    return x @ weight + bias


def dense_backward(
    dout: np.ndarray, x: np.ndarray, weight: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (dx, dweight, dbias)."""
    dweight = x.T @ dout
    dbias = dout.sum(axis=0, dtype=np.float64).astype(dout.dtype)
    dx = dout @ weight.T
    return dx, dweight, dbias


def sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Log-sum-exp stabilised log-probabilities along the last axis (float64)."""
    return _log_softmax(np.asarray(logits, dtype=np.float64), axis=-1)


def softmax(logits: np.ndarray) -> np.ndarray:
    return np.exp(log_softmax(logits))


def cross_entropy(logits: np.ndarray, labels: np.ndarray | int) -> tuple[float, np.ndarray]:
    """
    Mean negative log-likelihood and its gradient w.r.t. the logits.

    Args:
        logits: (n_classes,) for one sample or (N, n_classes) for a batch
        labels: class index, or (N,) indices

    Returns:
        (loss, dlogits) with dlogits shaped like ``logits`` (float64)
    """
    single = np.ndim(logits) == 1
    z = np.atleast_2d(np.asarray(logits, dtype=np.float64))
    y = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if y.shape[0] != z.shape[0]:
        raise ShapeMismatch(f"{z.shape[0]} logit rows but {y.shape[0]} labels")
    logp = log_softmax(z)
    rows = np.arange(z.shape[0])
    loss = float(-logp[rows, y].sum() / z.shape[0])
    grad = np.exp(logp)
    grad[rows, y] -= 1.0
    grad /= z.shape[0]
    return loss, (grad[0] if single else grad)
