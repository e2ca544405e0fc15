"""Primitive layer operations on (C, H, W) float32 activations.

Convolutions and batch-norm accumulate in float64 and store float32, which
keeps per-element results tight against a naive direct-summation reference
while matching the 32-bit storage contract of the weight files.
"""

import numpy as np


class ShapeError(ValueError):
    pass


def _as_chw(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 3:
        raise ShapeError(f"expected a (C, H, W) tensor, got shape {x.shape}")
    return x


def conv2d(x: np.ndarray, kernel: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Stride-1, zero-padded 'same' convolution.

    ``kernel`` is (out_channels, in_channels, kh, kw) with odd kh, kw;
    ``bias`` is (out_channels,).
    """
    x = _as_chw(x)
    kernel = np.asarray(kernel)
    bias = np.asarray(bias)
    if kernel.ndim != 4:
        raise ShapeError(f"kernel must be 4D (O, I, kh, kw), got shape {kernel.shape}")
    out_ch, in_ch, kh, kw = kernel.shape
    if in_ch != x.shape[0]:
        raise ShapeError(f"kernel expects {in_ch} input channels, tensor has {x.shape[0]}")
    if kh % 2 == 0 or kw % 2 == 0:
        raise ShapeError(f"kernel size must be odd, got {kh}x{kw}")
    if bias.shape != (out_ch,):
        raise ShapeError(f"bias must have shape ({out_ch},), got {bias.shape}")

    _, h, w = x.shape
    ph, pw = kh // 2, kw // 2
    padded = np.zeros((in_ch, h + 2 * ph, w + 2 * pw), dtype=np.float64)
    padded[:, ph:ph + h, pw:pw + w] = x
    out = np.zeros((out_ch, h, w), dtype=np.float64)
    k64 = kernel.astype(np.float64)
    for dy in range(kh):
        for dx in range(kw):
            window = padded[:, dy:dy + h, dx:dx + w]
            out += np.tensordot(k64[:, :, dy, dx], window, axes=([1], [0]))
    out += bias.astype(np.float64)[:, None, None]
    return out.astype(np.float32)


def batch_norm_inference(x: np.ndarray, gamma: np.ndarray, beta: np.ndarray,
                         mean: np.ndarray, var: np.ndarray, epsilon: float) -> np.ndarray:
    """Per-channel gamma * (x - mean) / sqrt(var + eps) + beta."""
    x = _as_chw(x)
    c = x.shape[0]
    for name, v in (("gamma", gamma), ("beta", beta), ("mean", mean), ("var", var)):
        if np.asarray(v).shape != (c,):
            raise ShapeError(f"batch-norm {name} must have shape ({c},), got {np.asarray(v).shape}")
    g = np.asarray(gamma, dtype=np.float64)[:, None, None]
    b = np.asarray(beta, dtype=np.float64)[:, None, None]
    m = np.asarray(mean, dtype=np.float64)[:, None, None]
    s = np.sqrt(np.asarray(var, dtype=np.float64)[:, None, None] + float(epsilon))
    return (g * (x.astype(np.float64) - m) / s + b).astype(np.float32)


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(np.asarray(x), 0).astype(np.float32)


def max_pool_2x2(x: np.ndarray) -> np.ndarray:
    x = _as_chw(x)
    c, h, w = x.shape
    if h % 2 or w % 2:
        raise ShapeError(f"max pooling needs even spatial dims, got {h}x{w}")
    return x.reshape(c, h // 2, 2, w // 2, 2).max(axis=(2, 4)).astype(np.float32)


def upsample_2x_nearest(x: np.ndarray) -> np.ndarray:
    x = _as_chw(x)
    return np.repeat(np.repeat(x, 2, axis=1), 2, axis=2).astype(np.float32)


def concat_channels(inputs: list[np.ndarray]) -> np.ndarray:
    if not inputs:
        raise ShapeError("concat needs at least one input")
    tensors = [_as_chw(t) for t in inputs]
    spatial = {t.shape[1:] for t in tensors}
    if len(spatial) != 1:
        raise ShapeError(f"concat inputs disagree on spatial dims: {sorted(spatial)}")
    return np.concatenate(tensors, axis=0).astype(np.float32)


def residual_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a, b = _as_chw(a), _as_chw(b)
    if a.shape != b.shape:
        raise ShapeError(f"residual add needs equal shapes, got {a.shape} and {b.shape}")
    return (a + b).astype(np.float32)
