"""Two-plane hologram composition and numerical reconstruction.

A host image and a (much fainter) payload image are recorded at opposite
signed depths: each is lifted to a complex field, propagated to the hologram
plane, max-normalized, and summed as

    u = H_host + alpha * H_payload.

Back-propagating u by the negated recording distance of either plane brings
that plane into focus while the other plane's light stays defocused.  The
payload field gets a seeded random phase before propagation so its energy
spreads over the whole hologram aperture.
"""

import struct
from dataclasses import dataclass, replace

import numpy as np

from .optics import (
    ComplexField,
    PropagationParams,
    amplitude,
    apply_random_phase,
    normalize,
    propagate,
)


class HologramFormatError(ValueError):
    """Raised when a hologram container file is malformed."""


@dataclass(frozen=True)
class EmbeddingConfig:
    """Recording geometry and payload weighting.

    ``alpha`` is the payload weight in (0, 1]; the two recording depths must
    differ so each plane defocuses in the other's reconstruction.
    """

    z_host: float = -0.4
    z_embed: float = 0.4
    alpha: float = 0.04
    wavelength: float = 633e-9
    pitch: float = 10e-6
    phase_seed: int = 0

    def __post_init__(self):
        if self.z_host == self.z_embed:
            raise ValueError("z_host and z_embed must differ")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if self.wavelength <= 0 or self.pitch <= 0:
            raise ValueError("wavelength and pitch must be positive")


@dataclass(frozen=True)
class HologramPackage:
    """A composed hologram field together with its recording parameters."""

    field: ComplexField
    config: EmbeddingConfig

    def __post_init__(self):
        if self.field.wavelength != self.config.wavelength or self.field.pitch != self.config.pitch:
            raise ValueError("field metadata does not match the embedding config")


# Seed offset for the optional host-plane phase noise, so host and payload
# never share a phase stream even for equal seeds.
_HOST_PHASE_SEED_OFFSET = 0x9E3779B9


def _validate_pair(host: np.ndarray, embedded: np.ndarray):
    if host.shape != embedded.shape:
        raise ValueError(f"host {host.shape} and payload {embedded.shape} dimensions differ")
    for name, img in (("host", host), ("payload", embedded)):
        if img.min() < 0.0 or img.max() > 1.0:
            raise ValueError(f"{name} image values must lie in [0, 1]")


def component_holograms(host: np.ndarray, embedded: np.ndarray, config: EmbeddingConfig,
                        band_limit: bool = True,
                        host_random_phase: bool = False) -> tuple[ComplexField, ComplexField]:
    """Propagated, max-normalized host and payload holograms (payload unweighted).

    Exposed separately from :func:`embed` so callers can reason about the two
    summands (energy split, payload-term linearity) before weighting.
    """
    host = np.asarray(host, dtype=np.float64)
    embedded = np.asarray(embedded, dtype=np.float64)
    _validate_pair(host, embedded)

    u_host = ComplexField.from_image(host, config.pitch, config.wavelength)
    if host_random_phase:
        u_host = apply_random_phase(u_host, config.phase_seed + _HOST_PHASE_SEED_OFFSET)
    u_embed = apply_random_phase(
        ComplexField.from_image(embedded, config.pitch, config.wavelength), config.phase_seed)

    host_holo = normalize(propagate(u_host, PropagationParams(config.z_host, band_limit)))
    embed_holo = normalize(propagate(u_embed, PropagationParams(config.z_embed, band_limit)))
    return host_holo, embed_holo


def embed(host: np.ndarray, embedded: np.ndarray, config: EmbeddingConfig,
          band_limit: bool = True, host_random_phase: bool = False) -> HologramPackage:
    """Compose the final hologram ``H_host + alpha * H_payload``."""
    host_holo, embed_holo = component_holograms(
        host, embedded, config, band_limit=band_limit, host_random_phase=host_random_phase)
    u = host_holo.data + config.alpha * embed_holo.data
    return HologramPackage(field=host_holo.with_data(u), config=config)


def reconstruct(holo: HologramPackage, which_plane: str, band_limit: bool = True) -> np.ndarray:
    """Back-propagate to the requested plane and return the [0, 1] amplitude image.

    ``which_plane`` is ``"host"`` or ``"embed"``.  The returned image still
    contains the other plane's defocused light.
    """
    if which_plane == "host":
        z = holo.config.z_host
    elif which_plane == "embed":
        z = holo.config.z_embed
    else:
        raise ValueError(f"which_plane must be 'host' or 'embed', got {which_plane!r}")
    rec = amplitude(propagate(holo.field, PropagationParams(-z, band_limit)))
    peak = rec.max()
    return rec / peak if peak > 0 else rec


# ---------------------------------------------------------------------------
# Container file: "HOLO" magic, little-endian header, complex128 samples
# interleaved as (real, imag) float64 pairs in row-major order.
# ---------------------------------------------------------------------------

_HOLO_MAGIC = b"HOLO"
_HOLO_VERSION = 1
_HOLO_HEADER = struct.Struct("<4sIIIdddddq")


def write_hologram(package: HologramPackage, path) -> None:
    cfg = package.config
    header = _HOLO_HEADER.pack(
        _HOLO_MAGIC, _HOLO_VERSION,
        package.field.width, package.field.height,
        cfg.pitch, cfg.wavelength, cfg.z_host, cfg.z_embed, cfg.alpha,
        cfg.phase_seed,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(package.field.data, dtype="<c16").tobytes())


def read_hologram(path) -> HologramPackage:
    with open(path, "rb") as fh:
        raw = fh.read(_HOLO_HEADER.size)
        if len(raw) != _HOLO_HEADER.size:
            raise HologramFormatError(f"{path}: truncated header")
        magic, version, width, height, pitch, wavelength, z_host, z_embed, alpha, seed = (
            _HOLO_HEADER.unpack(raw))
        if magic != _HOLO_MAGIC:
            raise HologramFormatError(f"{path}: bad magic {magic!r}")
        if version != _HOLO_VERSION:
            raise HologramFormatError(f"{path}: unsupported version {version}")
        count = width * height
        raw = fh.read(count * 16)
        if len(raw) != count * 16:
            raise HologramFormatError(f"{path}: truncated sample data")
        data = np.frombuffer(raw, dtype="<c16")
    field = ComplexField(
        data=data.reshape(height, width).astype(np.complex128), pitch=pitch, wavelength=wavelength)
    config = EmbeddingConfig(
        z_host=z_host, z_embed=z_embed, alpha=alpha,
        wavelength=wavelength, pitch=pitch, phase_seed=seed)
    return HologramPackage(field=field, config=config)


def with_alpha(config: EmbeddingConfig, alpha: float) -> EmbeddingConfig:
    """Convenience for sweeping the payload weight in experiments."""
    return replace(config, alpha=alpha)
