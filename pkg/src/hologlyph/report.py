"""Evaluation reports: per-image and aggregate PSNR/SSIM as TSV plus figures.

The report path always renders figures next to the delimited output: one
side-by-side comparison panel per image pair and one summary bar chart.
"""

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .metrics import psnr, ssim


@dataclass(frozen=True)
class PairResult:
    name: str
    psnr_db: float
    ssim: float


def evaluate_pairs(pairs: list[tuple[str, np.ndarray, np.ndarray]]) -> list[PairResult]:
    return [PairResult(name, psnr(restored, truth), ssim(restored, truth))
            for name, restored, truth in pairs]


def write_report(results: list[PairResult], path) -> None:
    """Tab-separated rows, one per image, then an aggregate (mean) row."""
    lines = ["name\tpsnr_db\tssim"]
    for r in results:
        lines.append(f"{r.name}\t{r.psnr_db:.6f}\t{r.ssim:.6f}")
    if results:
        mean_psnr = sum(r.psnr_db for r in results) / len(results)
        mean_ssim = sum(r.ssim for r in results) / len(results)
        lines.append(f"aggregate\t{mean_psnr:.6f}\t{mean_ssim:.6f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def render_comparison(name: str, restored: np.ndarray, truth: np.ndarray,
                      result: PairResult, path) -> None:
    fig, axes = plt.subplots(1, 3, figsize=(9.6, 3.4))
    for ax, img, title in zip(
            axes,
            (truth, restored, np.abs(restored - truth)),
            ("reference", "restored", "absolute error")):
        im = ax.imshow(img, cmap="gray", vmin=0.0, vmax=1.0, interpolation="nearest")
        ax.set_title(title, fontsize=9)
        ax.set_axis_off()
    fig.colorbar(im, ax=axes[-1], fraction=0.046)
    fig.suptitle(f"{name}: PSNR {result.psnr_db:.2f} dB, SSIM {result.ssim:.4f}", fontsize=10)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_summary(results: list[PairResult], path) -> None:
    names = [r.name for r in results]
    x = np.arange(len(names))
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(max(4.8, 0.6 * len(names) + 2), 5.4), sharex=True)
    ax1.bar(x, [r.psnr_db for r in results], color="#4878a8")
    ax1.set_ylabel("PSNR [dB]")
    ax2.bar(x, [r.ssim for r in results], color="#8a5f9e")
    ax2.set_ylabel("SSIM")
    ax2.set_ylim(0.0, 1.05)
    ax2.set_xticks(x)
    ax2.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_report(pairs: list[tuple[str, np.ndarray, np.ndarray]], out_dir) -> list[PairResult]:
    """Evaluate pairs and write report.tsv plus all figures under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = evaluate_pairs(pairs)
    write_report(results, out_dir / "report.tsv")
    for (name, restored, truth), result in zip(pairs, results):
        render_comparison(name, restored, truth, result, out_dir / f"compare_{name}.png")
    if results:
        render_summary(results, out_dir / "summary.png")
    return results
