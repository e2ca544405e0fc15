"""HWF1 weight container: a flat, bit-exact list of named float32 tensors.

Layout (all integers little-endian):

    magic "HWF1"
    u32 tensor_count
    per tensor:
        u32 name_length, UTF-8 name
        u32 rank, u32 dims[rank]
        float32 values, row-major

Kernels are stored as (out_channels, in_channels, kh, kw); vectors are rank 1.
Write -> read -> write is byte-identical: tensor order is preserved and values
round-trip without re-encoding.
"""

import struct
from collections import OrderedDict

import numpy as np

HWF1_MAGIC = b"HWF1"


class WeightFormatError(ValueError):
    pass


def write_weights(weights: "OrderedDict[str, np.ndarray] | dict[str, np.ndarray]", path) -> None:
    with open(path, "wb") as fh:
        fh.write(HWF1_MAGIC)
        fh.write(struct.pack("<I", len(weights)))
        for name, tensor in weights.items():
            arr = np.ascontiguousarray(tensor, dtype="<f4")
            encoded = name.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(struct.pack("<I", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())


def read_weights(path) -> "OrderedDict[str, np.ndarray]":
    def take(fh, n: int, what: str) -> bytes:
        raw = fh.read(n)
        if len(raw) != n:
            raise WeightFormatError(f"{path}: truncated while reading {what}")
        return raw

    weights: OrderedDict[str, np.ndarray] = OrderedDict()
    with open(path, "rb") as fh:
        if take(fh, 4, "magic") != HWF1_MAGIC:
            raise WeightFormatError(f"{path}: not an HWF1 weight file")
        (count,) = struct.unpack("<I", take(fh, 4, "tensor count"))
        for i in range(count):
            (name_len,) = struct.unpack("<I", take(fh, 4, "name length"))
            name = take(fh, name_len, "name").decode("utf-8")
            (rank,) = struct.unpack("<I", take(fh, 4, "rank"))
            dims = struct.unpack(f"<{rank}I", take(fh, 4 * rank, "dims"))
            n_values = int(np.prod(dims, dtype=np.int64)) if rank else 1
            raw = take(fh, 4 * n_values, f"values of {name}")
            arr = np.frombuffer(raw, dtype="<f4").reshape(dims).astype(np.float32)
            if name in weights:
                raise WeightFormatError(f"{path}: duplicate tensor name {name!r}")
            weights[name] = arr
    return weights


def random_weights(param_shapes: dict[str, tuple[int, ...]], seed: int) -> "OrderedDict[str, np.ndarray]":
    """Plausibly-scaled random parameters for every expected tensor.

    Kernels get fan-in scaled noise, batch-norm stats stay near identity, so
    activations keep a moderate dynamic range.  Useful for engine tests that
    need valid weights without a training run.
    """
    gen = np.random.Generator(np.random.PCG64(seed))
    out: OrderedDict[str, np.ndarray] = OrderedDict()
    for name, shape in param_shapes.items():
        if name.endswith(".kernel"):
            fan_in = int(np.prod(shape[1:]))
            out[name] = (gen.standard_normal(shape) / np.sqrt(fan_in)).astype(np.float32)
        elif name.endswith(".bias") or name.endswith(".beta") or name.endswith(".running_mean"):
            out[name] = (0.1 * gen.standard_normal(shape)).astype(np.float32)
        elif name.endswith(".gamma"):
            out[name] = (1.0 + 0.1 * gen.standard_normal(shape)).astype(np.float32)
        elif name.endswith(".running_var"):
            out[name] = gen.uniform(0.5, 2.0, shape).astype(np.float32)
        elif name.endswith(".epsilon"):
            out[name] = np.full(shape, 1e-5, dtype=np.float32)
        else:
            out[name] = gen.standard_normal(shape).astype(np.float32)
    return out
