"""Hologram-based image hiding with block-wise CNN restoration."""

from .optics import (
    ComplexField,
    PropagationParams,
    amplitude,
    apply_random_phase,
    normalize,
    propagate,
)
from .embedding import (
    EmbeddingConfig,
    HologramPackage,
    component_holograms,
    embed,
    read_hologram,
    reconstruct,
    write_hologram,
)
from .dataset import (
    BlockGrid,
    DatasetManifest,
    EmbeddedCanvasSpec,
    GenerationSeeds,
    build_embedded_canvas,
    generate_dataset,
    tile,
    untile,
)
from .metrics import QualityReport, compare, psnr, ssim

__version__ = "0.1.0"

__all__ = [
    "ComplexField", "PropagationParams", "propagate", "apply_random_phase",
    "normalize", "amplitude",
    "EmbeddingConfig", "HologramPackage", "embed", "component_holograms",
    "reconstruct", "write_hologram", "read_hologram",
    "EmbeddedCanvasSpec", "BlockGrid", "DatasetManifest", "GenerationSeeds",
    "build_embedded_canvas", "generate_dataset", "tile", "untile",
    "QualityReport", "psnr", "ssim", "compare",
    "__version__",
]
