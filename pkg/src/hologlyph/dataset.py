"""Training-corpus generation: payload canvases, block tiling, and the manifest.

A sample couples one host image with a payload canvas built from a grid of
glyphs (the rest of the canvas stays empty on purpose, so a restoration model
can learn to leave glyph-free regions dark).  Each sample is embedded into a
hologram, the payload plane is reconstructed, and both the reconstruction and
the canvas are tiled into fixed-size blocks that form the (input, target)
training pairs.
"""

import json
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from PIL import Image

from . import pgm
from .embedding import EmbeddingConfig, embed, reconstruct, write_hologram


class DatasetError(ValueError):
    pass


@dataclass(frozen=True)
class EmbeddedCanvasSpec:
    """Geometry of the glyph grid inside the payload canvas."""

    canvas_size: int = 2048
    glyph_size: int = 128
    grid: tuple[int, int] = (8, 8)
    placement_offset: tuple[int, int] = (0, 0)
    glyph_source: str | None = None

    def __post_init__(self):
        rows, cols = self.grid
        ox, oy = self.placement_offset
        if rows < 1 or cols < 1:
            raise DatasetError(f"grid must be at least 1x1, got {self.grid}")
        if ox < 0 or oy < 0:
            raise DatasetError("placement offset must be non-negative")
        if ox + cols * self.glyph_size > self.canvas_size or \
           oy + rows * self.glyph_size > self.canvas_size:
            raise DatasetError(
                f"glyph grid {rows}x{cols} of {self.glyph_size}px at offset {self.placement_offset} "
                f"does not fit a {self.canvas_size}px canvas")


@dataclass(frozen=True)
class BlockGrid:
    """Partition of a square frame into non-overlapping square blocks."""

    frame_size: int
    block_size: int = 128

    def __post_init__(self):
        if self.frame_size % self.block_size != 0:
            raise DatasetError(
                f"frame size {self.frame_size} is not divisible by block size {self.block_size}")

    @property
    def blocks_per_side(self) -> int:
        return self.frame_size // self.block_size

    @property
    def block_count(self) -> int:
        return self.blocks_per_side**2


@dataclass(frozen=True)
class GenerationSeeds:
    """Independent seed roots for the three random choices in generation."""

    phase: int = 0
    split: int = 1
    glyph: int = 2

    @classmethod
    def from_master(cls, master: int) -> "GenerationSeeds":
        return cls(phase=master, split=master + 1, glyph=master + 2)


@dataclass
class DatasetManifest:
    entries: list = field(default_factory=list)
    block_records: list = field(default_factory=list)

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as fh:
            for entry in self.entries:
                fh.write(json.dumps({"kind": "sample", **entry}) + "\n")
            for rec in self.block_records:
                fh.write(json.dumps({"kind": "block", **rec}) + "\n")

    @classmethod
    def load(cls, path) -> "DatasetManifest":
        manifest = cls()
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                kind = rec.pop("kind", None)
                if kind == "sample":
                    manifest.entries.append(rec)
                elif kind == "block":
                    manifest.block_records.append(rec)
                else:
                    raise DatasetError(f"{path}: unknown record kind {kind!r}")
        return manifest


def resize_bilinear(image: np.ndarray, size: int) -> np.ndarray:
    """Bilinear resize of a [0, 1] grayscale image to size x size."""
    img = np.asarray(image, dtype=np.float64)
    pil = Image.fromarray(np.rint(img * 255.0).astype(np.uint8), mode="L")
    out = pil.resize((size, size), resample=Image.BILINEAR)
    return np.asarray(out, dtype=np.float64) / 255.0


def load_grayscale(path, size: int | None = None) -> np.ndarray:
    """Load any still-image file as [0, 1] grayscale, optionally resized.

    P5 files are read exactly; everything else goes through Pillow with
    Rec. 601 luma weighting.
    """
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(2)
    if magic == b"P5":
        img = pgm.read_pgm(path)
    else:
        img = np.asarray(Image.open(path).convert("L"), dtype=np.float64) / 255.0
    if size is not None and img.shape != (size, size):
        img = resize_bilinear(img, size)
    return img


def build_embedded_canvas(spec: EmbeddedCanvasSpec, glyphs: list[np.ndarray]) -> np.ndarray:
    """Place the glyph grid on an otherwise empty canvas.

    Exactly rows*cols glyphs are required; each is bilinearly resized to the
    glyph size.  Values stay in [0, 1].
    """
    rows, cols = spec.grid
    if len(glyphs) != rows * cols:
        raise DatasetError(f"expected {rows * cols} glyphs, got {len(glyphs)}")
    canvas = np.zeros((spec.canvas_size, spec.canvas_size), dtype=np.float64)
    ox, oy = spec.placement_offset
    g = spec.glyph_size
    for idx, glyph in enumerate(glyphs):
        glyph = np.asarray(glyph, dtype=np.float64)
        if glyph.min() < 0.0 or glyph.max() > 1.0:
            raise DatasetError(f"glyph {idx} has values outside [0, 1]")
        if glyph.shape != (g, g):
            glyph = resize_bilinear(glyph, g)
        r, c = divmod(idx, cols)
        canvas[oy + r * g: oy + (r + 1) * g, ox + c * g: ox + (c + 1) * g] = glyph
    return canvas


def tile(frame: np.ndarray, grid: BlockGrid) -> list[np.ndarray]:
    """Split a frame into a row-major list of copies of its blocks."""
    frame = np.asarray(frame)
    if frame.shape != (grid.frame_size, grid.frame_size):
        raise DatasetError(
            f"frame shape {frame.shape} does not match grid frame size {grid.frame_size}")
    b = grid.block_size
    return [frame[r * b:(r + 1) * b, c * b:(c + 1) * b].copy()
            for r in range(grid.blocks_per_side)
            for c in range(grid.blocks_per_side)]


def untile(blocks: list[np.ndarray], grid: BlockGrid) -> np.ndarray:
    """Reassemble a row-major block list into the original frame."""
    if len(blocks) != grid.block_count:
        raise DatasetError(f"expected {grid.block_count} blocks, got {len(blocks)}")
    b = grid.block_size
    frame = np.empty((grid.frame_size, grid.frame_size), dtype=np.asarray(blocks[0]).dtype)
    for idx, block in enumerate(blocks):
        block = np.asarray(block)
        if block.shape != (b, b):
            raise DatasetError(f"block {idx} has shape {block.shape}, expected {(b, b)}")
        r, c = divmod(idx, grid.blocks_per_side)
        frame[r * b:(r + 1) * b, c * b:(c + 1) * b] = block
    return frame


def list_glyph_files(glyph_source) -> list[Path]:
    files = sorted(p for p in Path(glyph_source).iterdir() if p.is_file())
    if not files:
        raise DatasetError(f"glyph source {glyph_source} is empty")
    return files


def _pick_glyphs(files: list[Path], count: int, glyph_seed: int, sample_index: int) -> list[Path]:
    gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence([glyph_seed, sample_index])))
    return [files[i] for i in gen.integers(0, len(files), size=count)]


def split_samples(n_samples: int, val_fraction: float, split_seed: int) -> list[str]:
    """Deterministic whole-sample train/val assignment.

    The validation count is round(n * fraction); the assignment depends only
    on the seed, so reruns reproduce it exactly.
    """
    if not (0.0 <= val_fraction < 1.0):
        raise DatasetError(f"val fraction must be in [0, 1), got {val_fraction}")
    n_val = int(round(n_samples * val_fraction))
    gen = np.random.Generator(np.random.PCG64(split_seed))
    order = gen.permutation(n_samples)
    splits = ["train"] * n_samples
    for i in order[:n_val]:
        splits[i] = "val"
    return splits


def _generate_sample(args):
    (index, host_path, glyph_paths, config_dict, spec_dict, out_dir, block_size) = args
    config = EmbeddingConfig(**config_dict)
    spec = EmbeddedCanvasSpec(**spec_dict)
    out_dir = Path(out_dir)
    sid = f"s{index:04d}"
    sample_dir = out_dir / "samples" / sid
    block_dir = out_dir / "blocks" / sid
    sample_dir.mkdir(parents=True, exist_ok=True)
    block_dir.mkdir(parents=True, exist_ok=True)

    host = load_grayscale(host_path, size=spec.canvas_size)
    glyphs = [load_grayscale(p, size=spec.glyph_size) for p in glyph_paths]
    canvas = build_embedded_canvas(spec, glyphs)

    package = embed(host, canvas, config)
    recon = reconstruct(package, "embed")

    paths = {
        "host_path": f"samples/{sid}/host.pgm",
        "embedded_canvas_path": f"samples/{sid}/canvas.pgm",
        "hologram_path": f"samples/{sid}/hologram.holo",
        "reconstruction_path": f"samples/{sid}/recon.pgm",
    }
    pgm.write_pgm(host, out_dir / paths["host_path"])
    pgm.write_pgm(canvas, out_dir / paths["embedded_canvas_path"])
    write_hologram(package, out_dir / paths["hologram_path"])
    pgm.write_pgm(recon, out_dir / paths["reconstruction_path"])

    grid = BlockGrid(frame_size=spec.canvas_size, block_size=block_size)
    block_paths = []
    for b_idx, (inp, tgt) in enumerate(zip(tile(recon, grid), tile(canvas, grid))):
        in_path = f"blocks/{sid}/in_{b_idx:03d}.pgm"
        tgt_path = f"blocks/{sid}/tgt_{b_idx:03d}.pgm"
        pgm.write_pgm(inp, out_dir / in_path)
        pgm.write_pgm(tgt, out_dir / tgt_path)
        block_paths.append((in_path, tgt_path))

    entry = {"sample_id": sid, **paths, "phase_seed": config.phase_seed,
             "config": asdict(config)}
    return index, entry, block_paths


def generate_dataset(hosts: list, glyph_source, config: EmbeddingConfig,
                     spec: EmbeddedCanvasSpec, out_dir,
                     val_fraction: float = 5.0 / 300.0,
                     seeds: GenerationSeeds = GenerationSeeds(),
                     block_size: int = 128, jobs: int = 1) -> DatasetManifest:
    """Generate one sample per host image and write everything under ``out_dir``.

    Per-sample phase seeds are ``seeds.phase + index``; glyph choice and the
    train/val split have their own seed roots, so two runs with equal seeds
    produce byte-identical trees.  Samples are independent and can be built
    by a process pool (``jobs``).
    """
    hosts = list(hosts)
    if not hosts:
        raise DatasetError("need at least one host image")
    glyph_files = list_glyph_files(glyph_source)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    rows, cols = spec.grid
    tasks = []
    for i, host_path in enumerate(hosts):
        cfg_i = replace(config, phase_seed=seeds.phase + i)
        glyph_paths = _pick_glyphs(glyph_files, rows * cols, seeds.glyph, i)
        tasks.append((i, str(host_path), [str(p) for p in glyph_paths],
                      asdict(cfg_i), asdict(spec), str(out_dir), block_size))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_generate_sample, tasks))
    else:
        results = [_generate_sample(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    splits = split_samples(len(hosts), val_fraction, seeds.split)
    manifest = DatasetManifest()
    for index, entry, block_paths in results:
        manifest.entries.append(entry)
        for b_idx, (in_path, tgt_path) in enumerate(block_paths):
            manifest.block_records.append({
                "sample_id": entry["sample_id"],
                "block_index": b_idx,
                "split": splits[index],
                "input_block_path": in_path,
                "target_block_path": tgt_path,
            })
    manifest.save(out_dir / "manifest.jsonl")
    return manifest


# ---------------------------------------------------------------------------
# IDX ingestion: convert the classic big-endian IDX image archive (e.g. a
# handwritten-digit set) into a directory of P5 glyphs.
# ---------------------------------------------------------------------------

_IDX_IMAGES_MAGIC = 0x00000803


def ingest_idx_images(idx_path, out_dir, limit: int | None = None) -> int:
    """Write each image of an IDX u8 image archive as ``gNNNNN.pgm``; returns the count."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(idx_path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16:
            raise DatasetError(f"{idx_path}: truncated IDX header")
        magic, count, rows, cols = struct.unpack(">IIII", header)
        if magic != _IDX_IMAGES_MAGIC:
            raise DatasetError(f"{idx_path}: not an IDX u8 image file (magic {magic:#010x})")
        if limit is not None:
            count = min(count, limit)
        raw = fh.read(count * rows * cols)
        if len(raw) != count * rows * cols:
            raise DatasetError(f"{idx_path}: truncated IDX pixel data")
    images = np.frombuffer(raw, dtype=np.uint8).reshape(count, rows, cols)
    for i in range(count):
        pgm.write_pgm(images[i].astype(np.float64) / 255.0, out_dir / f"g{i:05d}.pgm")
    return count
