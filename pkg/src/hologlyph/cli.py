"""Command-line interface wiring the full pipeline.

Subcommands mirror the pipeline stages: ``embed`` composes a hologram,
``reconstruct`` brings one recording plane into focus, ``dataset-gen`` builds
a training corpus, ``restore`` runs the block-wise network over a frame, and
``eval`` scores restored images against references (TSV report + figures).

Every value can come from a JSON config file (``--config``); explicit flags
win.  The fully resolved configuration is echoed as one JSON line before any
work starts.  Exit codes: 0 success, 1 usage error, 2 data/validation error.
"""

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import pgm
from .dataset import (
    BlockGrid,
    DatasetError,
    EmbeddedCanvasSpec,
    GenerationSeeds,
    generate_dataset,
    load_grayscale,
    resize_bilinear,
)
from .embedding import EmbeddingConfig, embed, read_hologram, reconstruct, write_hologram
from .nn import load_netspec, read_weights, restore_frame
from .report import render_report

SEED_ENV_VAR = "HOLOGLYPH_SEED"

_HOLO_MAGIC = b"HOLO"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # Usage problems exit 1; data problems exit 2 (argparse's default is 2 for both).
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _add_common(sub, *names):
    """Attach the shared option set; defaults resolve later so --config can fill gaps."""
    specs = {
        "host": (str, "path to the host image (any grayscale/color still image)"),
        "payload": (str, "path to the payload image to hide"),
        "out": (str, "output path (file or directory, command-dependent)"),
        "alpha": (float, "payload weight in (0, 1], dimensionless"),
        "z_host": (float, "host recording distance in meters (signed)"),
        "z_embed": (float, "payload recording distance in meters (signed)"),
        "wavelength": (float, "light wavelength in meters"),
        "pitch": (float, "sampling interval in meters per pixel"),
        "seed": (int, f"master seed (fallback: ${SEED_ENV_VAR}, then 0)"),
        "size": (int, "hologram grid side in pixels (power of two)"),
        "block_size": (int, "restoration block side in pixels"),
        "grid": (str, "glyph grid as ROWSxCOLS, e.g. 8x8"),
        "weights": (str, "path to an HWF1 weight file"),
        "spec": (str, "path to the network spec sidecar (JSON)"),
        "jobs": (int, "worker count (default: logical CPU count)"),
        "holo": (str, "path to a hologram container file"),
        "plane": (str, "which plane to reconstruct: host or embed"),
        "input": (str, "input frame (P5) or hologram container file"),
        "restored": (str, "restored image file or directory"),
        "truth": (str, "reference image file or directory"),
        "hosts": (str, "directory of host images"),
        "glyphs": (str, "directory of glyph images (P5)"),
        "glyph_size": (int, "glyph side in pixels after resize"),
        "offset": (str, "glyph grid placement offset as X,Y pixels"),
        "split": (float, "validation fraction of samples, in [0, 1)"),
    }
    for name in names:
        typ, help_text = specs[name]
        flag = "--" + name.replace("_", "-")
        sub.add_argument(flag, type=typ, default=None, help=help_text)
    sub.add_argument("--config", type=str, default=None,
                     help="JSON file of option values; explicit flags win")


_DEFAULTS = {
    "alpha": 0.04,
    "z_host": -0.4,
    "z_embed": 0.4,
    "wavelength": 633e-9,
    "pitch": 10e-6,
    "size": None,
    "block_size": 128,
    "grid": "8x8",
    "glyph_size": 128,
    "offset": "0,0",
    "split": 5.0 / 300.0,
    "plane": "embed",
    "jobs": None,
}


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags over config-file values over built-in defaults."""
    file_values = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            file_values = json.load(fh)
        if not isinstance(file_values, dict):
            raise DatasetError(f"{args.config}: config file must hold a JSON object")
    resolved = {"command": args.command}
    for key, value in vars(args).items():
        if key in ("command", "config", "func"):
            continue
        if value is None:
            value = file_values.get(key, _DEFAULTS.get(key))
        resolved[key] = value
    if "seed" in resolved and resolved["seed"] is None:
        resolved["seed"] = int(os.environ.get(SEED_ENV_VAR, "0"))
    return resolved


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        rows, cols = (int(p) for p in text.lower().split("x"))
        return rows, cols
    except ValueError as exc:
        raise DatasetError(f"grid must look like 8x8, got {text!r}") from exc


def _parse_offset(text: str) -> tuple[int, int]:
    try:
        x, y = (int(p) for p in text.split(","))
        return x, y
    except ValueError as exc:
        raise DatasetError(f"offset must look like X,Y, got {text!r}") from exc


def _require(cfg: dict, *keys):
    for key in keys:
        if cfg.get(key) is None:
            flag = "--" + key.replace("_", "-")
            raise UsageError(f"missing required option {flag}")


def _embedding_config(cfg: dict) -> EmbeddingConfig:
    return EmbeddingConfig(
        z_host=cfg["z_host"], z_embed=cfg["z_embed"], alpha=cfg["alpha"],
        wavelength=cfg["wavelength"], pitch=cfg["pitch"], phase_seed=cfg["seed"])


def _load_image_sized(path, size) -> np.ndarray:
    img = load_grayscale(path)
    if size is not None and img.shape != (size, size):
        img = resize_bilinear(img, size)
    return img


def cmd_embed(cfg: dict) -> int:
    _require(cfg, "host", "payload", "out")
    host = _load_image_sized(cfg["host"], cfg["size"])
    payload = _load_image_sized(cfg["payload"], cfg["size"])
    if host.shape != payload.shape:
        raise DatasetError(
            f"{cfg['host']} is {host.shape} but {cfg['payload']} is {payload.shape}; "
            f"pass --size to resize both")
    n = host.shape[0]
    if host.shape[0] != host.shape[1] or n < 16 or n & (n - 1):
        raise DatasetError(
            f"{cfg['host']}: hologram grids must be square powers of two >= 16, "
            f"got {host.shape}; pass --size")
    package = embed(host, payload, _embedding_config(cfg))
    write_hologram(package, cfg["out"])
    return 0


def cmd_reconstruct(cfg: dict) -> int:
    _require(cfg, "holo", "out")
    if cfg["plane"] not in ("host", "embed"):
        raise UsageError(f"--plane must be host or embed, got {cfg['plane']!r}")
    package = read_hologram(cfg["holo"])
    pgm.write_pgm(reconstruct(package, cfg["plane"]), cfg["out"])
    return 0


def cmd_dataset_gen(cfg: dict) -> int:
    _require(cfg, "hosts", "glyphs", "out")
    host_dir = Path(cfg["hosts"])
    hosts = sorted(p for p in host_dir.iterdir() if p.is_file())
    if not hosts:
        raise DatasetError(f"{host_dir}: no host images found")
    size = cfg["size"] if cfg["size"] is not None else 2048
    spec = EmbeddedCanvasSpec(
        canvas_size=size, glyph_size=cfg["glyph_size"],
        grid=_parse_grid(cfg["grid"]), placement_offset=_parse_offset(cfg["offset"]),
        glyph_source=cfg["glyphs"])
    jobs = cfg["jobs"] if cfg["jobs"] else os.cpu_count() or 1
    manifest = generate_dataset(
        hosts, cfg["glyphs"], _embedding_config(cfg), spec, cfg["out"],
        val_fraction=cfg["split"], seeds=GenerationSeeds.from_master(cfg["seed"]),
        block_size=cfg["block_size"], jobs=jobs)
    print(f"generated {len(manifest.entries)} samples, "
          f"{len(manifest.block_records)} block pairs -> {cfg['out']}")
    return 0


def cmd_restore(cfg: dict) -> int:
    _require(cfg, "input", "weights", "spec", "out")
    with open(cfg["input"], "rb") as fh:
        magic = fh.read(4)
    if magic == _HOLO_MAGIC:
        frame = reconstruct(read_hologram(cfg["input"]), "embed")
    else:
        frame = pgm.read_pgm(cfg["input"])
    spec = load_netspec(cfg["spec"])
    weights = read_weights(cfg["weights"])
    grid = BlockGrid(frame_size=frame.shape[0], block_size=cfg["block_size"])
    jobs = cfg["jobs"] if cfg["jobs"] else os.cpu_count() or 1
    restored = restore_frame(spec, weights, frame, grid, jobs=jobs)
    pgm.write_pgm(restored.astype(np.float64), cfg["out"])
    return 0


def _collect_pairs(restored: str, truth: str) -> list[tuple[str, np.ndarray, np.ndarray]]:
    r_path, t_path = Path(restored), Path(truth)
    if r_path.is_dir() != t_path.is_dir():
        raise DatasetError("--restored and --truth must both be files or both directories")
    if not r_path.is_dir():
        return [(r_path.stem, load_grayscale(r_path), load_grayscale(t_path))]
    names = sorted({p.name for p in r_path.iterdir()} & {p.name for p in t_path.iterdir()})
    if not names:
        raise DatasetError(f"no common image names between {restored} and {truth}")
    return [(Path(n).stem, load_grayscale(r_path / n), load_grayscale(t_path / n))
            for n in names]


def cmd_eval(cfg: dict) -> int:
    _require(cfg, "restored", "truth", "out")
    pairs = _collect_pairs(cfg["restored"], cfg["truth"])
    results = render_report(pairs, cfg["out"])
    for r in results:
        print(f"{r.name}\tpsnr={r.psnr_db:.2f} dB\tssim={r.ssim:.4f}")
    mean_psnr = sum(r.psnr_db for r in results) / len(results)
    mean_ssim = sum(r.ssim for r in results) / len(results)
    print(f"aggregate\tpsnr={mean_psnr:.2f} dB\tssim={mean_ssim:.4f}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="hologlyph",
                     description="Hide an image in a hologram and restore it block by block.")
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = subs.add_parser("embed", help="compose a hologram from a host and a payload image")
    _add_common(p, "host", "payload", "out", "alpha", "z_host", "z_embed",
                "wavelength", "pitch", "seed", "size")
    p.set_defaults(func=cmd_embed)

    p = subs.add_parser("reconstruct", help="reconstruct one plane of a hologram")
    _add_common(p, "holo", "plane", "out")
    p.set_defaults(func=cmd_reconstruct)

    p = subs.add_parser("dataset-gen", help="generate a block-pair training corpus")
    _add_common(p, "hosts", "glyphs", "out", "alpha", "z_host", "z_embed", "wavelength",
                "pitch", "seed", "size", "glyph_size", "grid", "offset", "block_size",
                "split", "jobs")
    p.set_defaults(func=cmd_dataset_gen)

    p = subs.add_parser("restore", help="run the restoration network over a frame or hologram")
    _add_common(p, "input", "weights", "spec", "out", "block_size", "jobs")
    p.set_defaults(func=cmd_restore)

    p = subs.add_parser("eval", help="score restored images: TSV report plus figures")
    _add_common(p, "restored", "truth", "out")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = resolve_config(args)
        print(json.dumps(cfg, sort_keys=True), flush=True)
        return args.func(cfg)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"hologlyph: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
