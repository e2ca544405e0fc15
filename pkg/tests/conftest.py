import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

DEFAULT_WAVELENGTH = 633e-9
DEFAULT_PITCH = 10e-6


def smooth_image(n: int, seed: int, cutoff: float = 0.02) -> np.ndarray:
    """Low-pass filtered noise rescaled to [0, 1]; a stand-in for a natural host."""
    gen = np.random.default_rng(seed)
    spectrum = np.fft.fft2(gen.standard_normal((n, n)))
    fy, fx = np.meshgrid(np.fft.fftfreq(n), np.fft.fftfreq(n), indexing="ij")
    spectrum *= np.exp(-(fx**2 + fy**2) / (2.0 * cutoff**2))
    img = np.real(np.fft.ifft2(spectrum))
    return (img - img.min()) / (img.max() - img.min())


def synthetic_glyph(kind: int, size: int = 32) -> np.ndarray:
    """Simple high-contrast glyphs (bar / ring / cross / box outline)."""
    yy, xx = np.mgrid[0:size, 0:size]
    c = (size - 1) / 2.0
    if kind % 4 == 0:
        img = (np.abs(xx - c) < size // 6) & (np.abs(yy - c) < size // 2.5)
    elif kind % 4 == 1:
        r = np.hypot(xx - c, yy - c)
        img = (r < size * 0.4) & (r > size * 0.22)
    elif kind % 4 == 2:
        img = (np.abs(xx - c) < size // 8) | (np.abs(yy - c) < size // 8)
    else:
        edge = (xx < size // 8) | (xx >= size - size // 8) | \
               (yy < size // 8) | (yy >= size - size // 8)
        img = edge
    return img.astype(np.float64)


@pytest.fixture
def glyph_dir(tmp_path):
    from hologlyph import pgm

    d = tmp_path / "glyphs"
    d.mkdir()
    for i in range(6):
        pgm.write_pgm(synthetic_glyph(i), d / f"g{i}.pgm")
    return d


@pytest.fixture
def host_dir(tmp_path):
    from hologlyph import pgm

    d = tmp_path / "hosts"
    d.mkdir()
    for i in range(3):
        pgm.write_pgm(smooth_image(256, seed=100 + i), d / f"h{i}.pgm")
    return d
