"""Graph execution: weight validation, single-block forward, frame restoration."""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

from ..dataset import BlockGrid, tile, untile
from . import ops
from .netspec import INPUT, NetworkSpec, expected_parameters, validate_structure


class WeightValidationError(ValueError):
    pass


def validate_weights(spec: NetworkSpec, weights) -> None:
    """Reject any spec/weights mismatch before computing anything.

    The error message names the first offending layer in spec order.
    """
    validate_structure(spec)
    expected = expected_parameters(spec)
    for name, shape in expected.items():
        layer = name.rsplit(".", 1)[0]
        if name not in weights:
            raise WeightValidationError(f"layer {layer}: missing weight tensor {name!r}")
        got = tuple(np.asarray(weights[name]).shape)
        if got != shape:
            raise WeightValidationError(
                f"layer {layer}: tensor {name!r} has shape {got}, expected {shape}")
    extra = sorted(set(weights) - set(expected))
    if extra:
        raise WeightValidationError(f"unexpected weight tensors: {extra}")


def _run_graph(spec: NetworkSpec, weights, x: np.ndarray) -> np.ndarray:
    values = {INPUT: x}
    for layer in spec.layers:
        ins = [values[src] for src in layer.inputs]
        if layer.kind == "conv":
            out = ops.conv2d(ins[0], weights[f"{layer.name}.kernel"],
                             weights[f"{layer.name}.bias"])
        elif layer.kind == "batch_norm":
            n = layer.name
            out = ops.batch_norm_inference(
                ins[0], weights[f"{n}.gamma"], weights[f"{n}.beta"],
                weights[f"{n}.running_mean"], weights[f"{n}.running_var"],
                float(np.asarray(weights[f"{n}.epsilon"]).reshape(-1)[0]))
        elif layer.kind == "relu":
            out = ops.relu(ins[0])
        elif layer.kind == "max_pool_2x2":
            out = ops.max_pool_2x2(ins[0])
        elif layer.kind == "upsample_2x_nearest":
            out = ops.upsample_2x_nearest(ins[0])
        elif layer.kind == "concat_skip":
            out = ops.concat_channels(ins)
        else:  # residual_add; kinds are validated by LayerSpec
            out = ops.residual_add(ins[0], ins[1])
        values[layer.name] = out
    return values[spec.output]


def forward(spec: NetworkSpec, weights, block: np.ndarray) -> np.ndarray:
    """Run one (H, W) block in [0, 1] through the network; output clamped to [0, 1]."""
    block = np.asarray(block)
    c, h, w = spec.input_shape
    if block.shape != (h, w):
        raise ops.ShapeError(f"block shape {block.shape} does not match spec input {(h, w)}")
    if block.min() < 0.0 or block.max() > 1.0:
        raise ValueError("block values must lie in [0, 1]")
    validate_weights(spec, weights)
    x = block.astype(np.float32)[None, :, :]
    if c != 1:
        x = np.repeat(x, c, axis=0)
    out = _run_graph(spec, weights, x)
    return np.clip(out[0], 0.0, 1.0).astype(np.float32)


def restore_frame(spec: NetworkSpec, weights, frame: np.ndarray, grid: BlockGrid,
                  jobs: int = 1) -> np.ndarray:
    """Tile the frame, run each block independently, and reassemble.

    Blocks share only read-only weights, so any processing order (or thread
    count) yields the identical frame.
    """
    validate_weights(spec, weights)
    blocks = tile(frame, grid)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            restored = list(pool.map(lambda b: forward(spec, weights, b), blocks))
    else:
        restored = [forward(spec, weights, b) for b in blocks]
    return untile(restored, grid)
