"""HWF1 weight container I/O (independent implementation of the shared format).

Magic "HWF1", little-endian u32 tensor count, then per tensor: u32 name
length, UTF-8 name, u32 rank, u32 dims, float32 values row-major.  Kernels
are (out_channels, in_channels, kh, kw); vectors are rank 1.
"""

import struct
from collections import OrderedDict

import numpy as np

MAGIC = b"HWF1"


class Hwf1Error(ValueError):
    pass


def save(weights, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(weights)))
        for name, tensor in weights.items():
            arr = np.ascontiguousarray(tensor, dtype="<f4")
            raw_name = name.encode("utf-8")
            fh.write(struct.pack("<I", len(raw_name)))
            fh.write(raw_name)
            fh.write(struct.pack("<I", arr.ndim))
            fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
            fh.write(arr.tobytes())


def load(path) -> "OrderedDict[str, np.ndarray]":
    out: OrderedDict[str, np.ndarray] = OrderedDict()
    with open(path, "rb") as fh:
        blob = fh.read()
    if blob[:4] != MAGIC:
        raise Hwf1Error(f"{path}: bad magic")
    pos = 4

    def grab(n: int) -> bytes:
        nonlocal pos
        if pos + n > len(blob):
            raise Hwf1Error(f"{path}: truncated")
        piece = blob[pos:pos + n]
        pos += n
        return piece

    (count,) = struct.unpack("<I", grab(4))
    for _ in range(count):
        (name_len,) = struct.unpack("<I", grab(4))
        name = grab(name_len).decode("utf-8")
        (rank,) = struct.unpack("<I", grab(4))
        dims = struct.unpack(f"<{rank}I", grab(4 * rank))
        n = 1
        for d in dims:
            n *= d
        out[name] = np.frombuffer(grab(4 * n), dtype="<f4").reshape(dims).astype(np.float32)
    if pos != len(blob):
        raise Hwf1Error(f"{path}: {len(blob) - pos} trailing bytes")
    return out
