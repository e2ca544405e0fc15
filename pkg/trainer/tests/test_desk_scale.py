"""Desk-scale end-to-end gate: generate, train, restore, score.

Twenty 512x512 samples, wall-clock bounded training, and two quality bars on
the restored validation frames: >= 6 dB PSNR gain over their dim inputs and
a dark output in the deliberately glyph-free region.  The corpus comes from
the toolkit CLI and restoration runs through it too, so the only coupling is
the documented file formats.
"""

import json
import subprocess
import sys
import time

import numpy as np
import pytest

from hologlyph_trainer import TrainConfig, load_blocks, netspec, train_and_export

from hologlyph import pgm
from hologlyph.metrics import psnr

GAIN_DB = 6.0
EMPTY_MEAN_LIMIT = 0.05
TRAIN_BUDGET_S = 3600.0


def cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "hologlyph.cli", *map(str, argv)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def smooth_host(n: int, seed: int) -> np.ndarray:
    gen = np.random.default_rng(seed)
    spectrum = np.fft.fft2(gen.standard_normal((n, n)))
    fy, fx = np.meshgrid(np.fft.fftfreq(n), np.fft.fftfreq(n), indexing="ij")
    spectrum *= np.exp(-(fx**2 + fy**2) / (2.0 * 0.02**2))
    img = np.real(np.fft.ifft2(spectrum))
    return (img - img.min()) / (img.max() - img.min())


def make_glyph(kind: int, size: int = 64) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    c = (size - 1) / 2.0
    shapes = [
        (np.abs(xx - c) < size // 6) & (np.abs(yy - c) < size // 2.5),
        (np.hypot(xx - c, yy - c) < 0.4 * size) & (np.hypot(xx - c, yy - c) > 0.22 * size),
        (np.abs(xx - c) < size // 8) | (np.abs(yy - c) < size // 8),
        (np.abs(xx + yy - 2 * c) < size // 7),
    ]
    return shapes[kind % 4].astype(np.float64)


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("desk")
    hosts = root / "hosts"
    glyphs = root / "glyphs"
    hosts.mkdir(), glyphs.mkdir()
    for i in range(20):
        pgm.write_pgm(smooth_host(256, seed=500 + i), hosts / f"h{i:02d}.pgm")
    for k in range(4):
        pgm.write_pgm(make_glyph(k), glyphs / f"g{k}.pgm")
    out = root / "dataset"
    cli("dataset-gen", "--hosts", hosts, "--glyphs", glyphs, "--out", out,
        "--size", "512", "--glyph-size", "128", "--grid", "2x2",
        "--split", "0.2", "--seed", "42", "--jobs", "2")
    return root, out


def test_desk_scale_training_and_restoration(corpus):
    root, dataset = corpus
    manifest = dataset / "manifest.jsonl"
    train_set = load_blocks(manifest, "train")
    val_set = load_blocks(manifest, "val")
    assert len(train_set) == 16 * 16 and len(val_set) == 4 * 16

    spec = netspec.build_unet(filters=(8, 16, 32))
    config = TrainConfig(batch_size=50, learning_rate=1e-3, patience=10,
                         max_epochs=60, seed=0, spec=spec)
    weights_path = root / "unet.hwf1"
    spec_path = root / "unet.json"
    t0 = time.time()
    history = train_and_export(train_set, val_set, config,
                               weights_path, spec_path, root / "history.tsv")
    train_time = time.time() - t0
    assert train_time < TRAIN_BUDGET_S, f"training took {train_time:.0f}s"
    assert min(history.val_loss) < history.val_loss[0], "validation loss never improved"

    # collect validation samples from the manifest
    samples, block_split = {}, {}
    with open(manifest, "r", encoding="ascii") as fh:
        for line in fh:
            rec = json.loads(line)
            if rec["kind"] == "sample":
                samples[rec["sample_id"]] = rec
            else:
                block_split[rec["sample_id"]] = rec["split"]
    val_ids = sorted(sid for sid, split in block_split.items() if split == "val")
    assert len(val_ids) == 4

    gains, empty_means = [], []
    for sid in val_ids:
        entry = samples[sid]
        dim_path = dataset / entry["reconstruction_path"]
        target = pgm.read_pgm(dataset / entry["embedded_canvas_path"])
        restored_path = root / f"restored_{sid}.pgm"
        cli("restore", "--input", dim_path, "--weights", weights_path,
            "--spec", spec_path, "--out", restored_path, "--jobs", "2")
        dim = pgm.read_pgm(dim_path)
        restored = pgm.read_pgm(restored_path)
        gains.append(psnr(restored, target) - psnr(dim, target))
        empty = target == 0.0
        empty[:256, :256] = False  # keep only the glyph-free quadrants
        empty_means.append(float(restored[empty].mean()))

    print(f"[desk-scale] epochs {history.stopped_epoch} (best {history.best_epoch}), "
          f"train {train_time:.0f}s, gains dB {[round(g, 2) for g in gains]}, "
          f"empty means {[round(m, 4) for m in empty_means]}")
    assert min(gains) >= GAIN_DB, f"PSNR gains {gains} below {GAIN_DB} dB"
    assert max(empty_means) < EMPTY_MEAN_LIMIT, f"empty-region means {empty_means}"
    print(f"[PASS] desk-scale end-to-end (min gain {min(gains):.2f} dB, "
          f"max empty-region mean {max(empty_means):.4f})")
