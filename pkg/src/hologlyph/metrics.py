"""Image-quality metrics: PSNR and mean SSIM on [0, 1] float images."""

from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

#: PSNR reported for a zero-error comparison (and the overall ceiling), in dB.
PSNR_CAP_DB = 99.0

# Canonical mean-SSIM constants: 11x11 Gaussian window with sigma 1.5,
# K1=0.01, K2=0.03, dynamic range L=1.
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


@dataclass(frozen=True)
class QualityReport:
    psnr_db: float
    ssim: float


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image dimensions differ: {a.shape} vs {b.shape}")
    return a, b


def psnr(a: np.ndarray, b: np.ndarray) -> float:
    """10 log10(1 / MSE) in dB, capped at ``PSNR_CAP_DB``."""
    a, b = _check_pair(a, b)
    mse = np.mean((a - b) ** 2)
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(PSNR_CAP_DB, float(10.0 * np.log10(1.0 / mse)))


def _gaussian_window(size: int, sigma: float) -> np.ndarray:
    half = (size - 1) / 2.0
    coords = np.arange(size) - half
    g = np.exp(-(coords**2) / (2.0 * sigma**2))
    window = np.outer(g, g)
    return window / window.sum()


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean SSIM over a Gaussian window; identical inputs give exactly 1.0."""
    a, b = _check_pair(a, b)
    if min(a.shape) < SSIM_WINDOW:
        raise ValueError(
            f"images must be at least {SSIM_WINDOW}px per side for SSIM, got {a.shape}")
    w = _gaussian_window(SSIM_WINDOW, SSIM_SIGMA)
    c1 = SSIM_K1**2
    c2 = SSIM_K2**2

    def filt(x):
        return fftconvolve(x, w, mode="valid")

    mu_a = filt(a)
    mu_b = filt(b)
    # E[xy] - E[x]E[y] covariance estimates under the window weighting
    var_a = filt(a * a) - mu_a * mu_a
    var_b = filt(b * b) - mu_b * mu_b
    cov = filt(a * b) - mu_a * mu_b
    num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)
    den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2)
    return float(np.mean(num / den))


def compare(a: np.ndarray, b: np.ndarray) -> QualityReport:
    return QualityReport(psnr_db=psnr(a, b), ssim=ssim(a, b))
