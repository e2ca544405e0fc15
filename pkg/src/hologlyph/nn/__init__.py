from .netspec import LayerSpec, NetworkSpec, default_resnet, default_unet, load_netspec, save_netspec
from .weights import read_weights, write_weights
from .engine import forward, restore_frame, validate_weights

__all__ = [
    "LayerSpec", "NetworkSpec", "default_unet", "default_resnet",
    "load_netspec", "save_netspec", "read_weights", "write_weights",
    "forward", "restore_frame", "validate_weights",
]
