"""Manifest-driven block loading: JSONL records plus 8-bit P5 block images."""

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class DataError(ValueError):
    pass


def read_p5(path) -> np.ndarray:
    """Binary PGM to float32 in [0, 1] (maxval must be 255)."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if not blob.startswith(b"P5"):
        raise DataError(f"{path}: not a P5 file")
    fields = []
    pos = 2
    while len(fields) < 3:
        while pos < len(blob) and blob[pos:pos + 1].isspace():
            pos += 1
        if blob[pos:pos + 1] == b"#":
            while pos < len(blob) and blob[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(blob) and not blob[pos:pos + 1].isspace():
            pos += 1
        fields.append(int(blob[start:pos]))
    pos += 1  # single whitespace after maxval
    w, h, maxval = fields
    if maxval != 255:
        raise DataError(f"{path}: expected maxval 255, got {maxval}")
    pixels = blob[pos:pos + w * h]
    if len(pixels) != w * h:
        raise DataError(f"{path}: truncated pixel data")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w).astype(np.float32) / 255.0


@dataclass
class BlockSet:
    inputs: np.ndarray   # (N, 1, H, W) float32
    targets: np.ndarray  # (N, 1, H, W) float32

    def __len__(self) -> int:
        return self.inputs.shape[0]


def load_blocks(manifest_path, split: str) -> BlockSet:
    """Load every (input, target) block pair of one split into memory."""
    manifest_path = Path(manifest_path)
    root = manifest_path.parent
    inputs, targets = [], []
    with open(manifest_path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            rec = json.loads(line)
            if rec.get("kind") != "block" or rec.get("split") != split:
                continue
            inputs.append(read_p5(root / rec["input_block_path"]))
            targets.append(read_p5(root / rec["target_block_path"]))
    if not inputs:
        raise DataError(f"{manifest_path}: no '{split}' blocks found")
    return BlockSet(inputs=np.stack(inputs)[:, None, :, :],
                    targets=np.stack(targets)[:, None, :, :])
