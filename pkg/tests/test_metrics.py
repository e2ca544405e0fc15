import numpy as np
import pytest

from hologlyph.metrics import PSNR_CAP_DB, compare, psnr, ssim

from conftest import smooth_image


class TestPsnr:
    def test_identical_images_hit_cap(self):
        img = smooth_image(64, seed=1)
        assert psnr(img, img) == PSNR_CAP_DB == 99.0

    def test_uniform_offset_closed_form(self):
        img = np.full((64, 64), 0.3)
        assert psnr(img, img + 0.1) == pytest.approx(20.0, abs=1e-6)

    def test_symmetry(self):
        a = smooth_image(64, seed=2)
        b = smooth_image(64, seed=3)
        assert psnr(a, b) == psnr(b, a)

    def test_monotone_in_noise_level(self):
        img = smooth_image(64, seed=4)
        gen = np.random.default_rng(5)
        noise = gen.standard_normal(img.shape)
        values = [psnr(img, np.clip(img + s * noise, 0, 1)) for s in (0.01, 0.03, 0.1)]
        assert values[0] > values[1] > values[2]

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            psnr(np.zeros((8, 8)), np.zeros((8, 9)))

    def test_never_exceeds_cap(self):
        img = smooth_image(32, seed=6)
        assert psnr(img, img + 1e-9) <= PSNR_CAP_DB


class TestSsim:
    def test_identical_images_score_exactly_one(self):
        img = smooth_image(64, seed=7)
        assert ssim(img, img) == 1.0

    def test_bounded(self):
        for s in (8, 9):
            a = smooth_image(64, seed=s)
            b = smooth_image(64, seed=s + 10)
            assert -1.0 <= ssim(a, b) <= 1.0

    def test_structural_inversion_scores_low(self):
        gen = np.random.default_rng(11)
        img = (gen.random((64, 64)) > 0.5).astype(np.float64)
        assert ssim(img, 1.0 - img) < 0.05

    def test_small_image_rejected(self):
        with pytest.raises(ValueError):
            ssim(np.zeros((8, 8)), np.zeros((8, 8)))

    def test_degrades_with_noise(self):
        img = smooth_image(64, seed=12)
        gen = np.random.default_rng(13)
        noisy = np.clip(img + 0.2 * gen.standard_normal(img.shape), 0, 1)
        assert ssim(img, noisy) < ssim(img, img)


def test_compare_bundles_both():
    img = smooth_image(64, seed=14)
    report = compare(img, img)
    assert report.psnr_db == 99.0
    assert report.ssim == 1.0
