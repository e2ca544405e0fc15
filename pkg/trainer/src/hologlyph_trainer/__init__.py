"""Trainer for the hologlyph restoration networks.

Consumes a generated dataset (JSONL manifest + P5 blocks) and produces HWF1
weight files with their network-spec sidecars; talks to the toolkit only
through those file formats.
"""

from .data import BlockSet, load_blocks, read_p5
from .model import GraphNet, export_weights, forward_reference, import_weights
from .netspec import Spec, build_resnet, build_unet
from .train import History, TrainConfig, train, train_and_export

__version__ = "0.1.0"

__all__ = [
    "BlockSet", "load_blocks", "read_p5",
    "GraphNet", "export_weights", "import_weights", "forward_reference",
    "Spec", "build_unet", "build_resnet",
    "History", "TrainConfig", "train", "train_and_export",
    "__version__",
]
