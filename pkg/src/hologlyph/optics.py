"""Scalar wave fields and free-space propagation.

The propagation operator works in the spatial-frequency domain: the field is
FFT'd, multiplied by the transfer function

    H(fx, fy) = exp(i 2 pi z sqrt(1/lambda^2 - fx^2 - fy^2)),

and transformed back.  Frequencies in the evanescent region
(1/lambda^2 - fx^2 - fy^2 < 0) are hard-zeroed rather than attenuated, so the
operator is unitary on the propagating band and exactly invertible by
propagating over -z.  With ``band_limit`` enabled, frequencies beyond the
aliasing-safe bound

    f_limit = 1 / (lambda * sqrt((2 * df * z)^2 + 1)),   df = 1/(N * pitch)

are zeroed independently per axis, which keeps the sampled transfer function
faithful for long propagation distances.

All functions are pure: inputs are never mutated and identical inputs give
bit-identical outputs, so they are safe to call from multiple threads.
"""

from dataclasses import dataclass

import numpy as np


class FieldError(ValueError):
    """Raised when a field violates its structural invariants."""


class DegenerateFieldError(ValueError):
    """Raised when an operation is undefined for the given field (e.g. all zeros)."""


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class ComplexField:
    """A sampled complex amplitude distribution with its physical metadata.

    ``data`` is a (height, width) complex128 array; ``pitch`` is the sampling
    interval in meters (identical in x and y) and ``wavelength`` is in meters.
    Grid sides must be powers of two of at least 16 so FFT sizes stay friendly.
    """

    data: np.ndarray
    pitch: float
    wavelength: float

    def __post_init__(self):
        d = self.data
        if not isinstance(d, np.ndarray) or d.ndim != 2:
            raise FieldError("field data must be a 2D array")
        if d.dtype != np.complex128:
            raise FieldError(f"field data must be complex128, got {d.dtype}")
        h, w = d.shape
        if not (_is_pow2(w) and w >= 16 and _is_pow2(h) and h >= 16):
            raise FieldError(f"field dimensions must be powers of two >= 16, got {w}x{h}")
        if not self.pitch > 0:
            raise FieldError(f"pitch must be positive, got {self.pitch}")
        if not self.wavelength > 0:
            raise FieldError(f"wavelength must be positive, got {self.wavelength}")

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @classmethod
    def from_image(cls, image: np.ndarray, pitch: float, wavelength: float) -> "ComplexField":
        """Lift a real-valued image to a zero-phase complex field."""
        img = np.asarray(image, dtype=np.float64)
        return cls(data=img.astype(np.complex128), pitch=pitch, wavelength=wavelength)

    def with_data(self, data: np.ndarray) -> "ComplexField":
        return ComplexField(data=data, pitch=self.pitch, wavelength=self.wavelength)


@dataclass(frozen=True)
class PropagationParams:
    """Signed propagation distance in meters plus the band-limit switch.

    Negative ``distance_z`` propagates toward the source side; zero is the
    identity on the propagating band.
    """

    distance_z: float
    band_limit: bool = True


def transfer_function(height: int, width: int, pitch: float, wavelength: float,
                      params: PropagationParams) -> np.ndarray:
    """Sampled transfer function on the wraparound FFT frequency grid.

    Evanescent bins carry exactly 0; with ``band_limit`` the per-axis
    aliasing bound is applied on top.
    """
    fx = np.fft.fftfreq(width, d=pitch)
    fy = np.fft.fftfreq(height, d=pitch)
    FX, FY = np.meshgrid(fx, fy)
    arg = 1.0 / wavelength**2 - FX**2 - FY**2
    propagating = arg >= 0.0
    kz = np.sqrt(np.where(propagating, arg, 0.0))
    H = np.where(propagating, np.exp(2j * np.pi * params.distance_z * kz), 0.0 + 0.0j)
    if params.band_limit:
        dfx = 1.0 / (width * pitch)
        dfy = 1.0 / (height * pitch)
        flx = 1.0 / (wavelength * np.sqrt((2.0 * dfx * params.distance_z) ** 2 + 1.0))
        fly = 1.0 / (wavelength * np.sqrt((2.0 * dfy * params.distance_z) ** 2 + 1.0))
        H = np.where((np.abs(FX) > flx) | (np.abs(FY) > fly), 0.0 + 0.0j, H)
    return H


def propagate(field: ComplexField, params: PropagationParams) -> ComplexField:
    """Propagate a field over the signed distance in ``params``.

    Returns a new field with identical dimensions and metadata.  The input is
    not mutated.
    """
    H = transfer_function(field.height, field.width, field.pitch, field.wavelength, params)
    spectrum = np.fft.fft2(field.data)
    out = np.fft.ifft2(spectrum * H)
    return field.with_data(out)


#: Identifier of the phase-noise generator; the exact algorithm is part of the
#: on-disk reproducibility contract (see README, "Random phase generator").
PHASE_PRNG = "pcg64-uniform-v1"


def apply_random_phase(field: ComplexField, seed: int) -> ComplexField:
    """Multiply each sample by exp(i theta), theta ~ U[0, 2 pi), from PCG64(seed).

    The draw order is row-major over the grid.  The same seed gives a
    bit-identical result; per-sample amplitude is preserved to within one or
    two double-precision ULP (a unit-modulus complex multiply cannot be made
    bit-exact in IEEE-754).
    """
    gen = np.random.Generator(np.random.PCG64(seed))
    theta = gen.random(field.data.shape) * (2.0 * np.pi)
    return field.with_data(field.data * np.exp(1j * theta))


def normalize(field: ComplexField) -> ComplexField:
    """Scale so the maximum amplitude is 1; undefined for an all-zero field."""
    peak = np.abs(field.data).max()
    if peak == 0.0:
        raise DegenerateFieldError("cannot normalize an all-zero field")
    return field.with_data(field.data / peak)


def amplitude(field: ComplexField) -> np.ndarray:
    """Per-pixel modulus |u| as a float64 image of the same dimensions."""
    return np.abs(field.data)
