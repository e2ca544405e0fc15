"""Torch executor for network specs, plus HWF1 import/export of its weights."""

from collections import OrderedDict

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from .netspec import INPUT, Spec, check


class GraphNet(nn.Module):
    """Runs a spec graph as written; layer names become module names."""

    def __init__(self, spec: Spec):
        super().__init__()
        self.spec = spec
        shapes = check(spec)
        self.blocks = nn.ModuleDict()
        for layer in spec.layers:
            in_c = shapes[layer.inputs[0]][0]
            if layer.kind == "conv":
                self.blocks[layer.name] = nn.Conv2d(
                    in_c, layer.filters, layer.kernel_size,
                    stride=1, padding=layer.kernel_size // 2, bias=True)
            elif layer.kind == "batch_norm":
                self.blocks[layer.name] = nn.BatchNorm2d(in_c)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        values = {INPUT: x}
        for layer in self.spec.layers:
            ins = [values[s] for s in layer.inputs]
            if layer.kind in ("conv", "batch_norm"):
                out = self.blocks[layer.name](ins[0])
            elif layer.kind == "relu":
                out = F.relu(ins[0])
            elif layer.kind == "max_pool_2x2":
                out = F.max_pool2d(ins[0], kernel_size=2)
            elif layer.kind == "upsample_2x_nearest":
                out = F.interpolate(ins[0], scale_factor=2, mode="nearest")
            elif layer.kind == "concat_skip":
                out = torch.cat(ins, dim=1)
            else:  # residual_add
                out = ins[0] + ins[1]
            values[layer.name] = out
        return values[self.spec.output]


def export_weights(model: GraphNet) -> "OrderedDict[str, np.ndarray]":
    """Named float32 tensors in spec order, running stats included."""
    out: OrderedDict[str, np.ndarray] = OrderedDict()
    for layer in model.spec.layers:
        if layer.kind == "conv":
            conv = model.blocks[layer.name]
            out[f"{layer.name}.kernel"] = conv.weight.detach().cpu().numpy().astype(np.float32)
            out[f"{layer.name}.bias"] = conv.bias.detach().cpu().numpy().astype(np.float32)
        elif layer.kind == "batch_norm":
            bn = model.blocks[layer.name]
            out[f"{layer.name}.gamma"] = bn.weight.detach().cpu().numpy().astype(np.float32)
            out[f"{layer.name}.beta"] = bn.bias.detach().cpu().numpy().astype(np.float32)
            out[f"{layer.name}.running_mean"] = bn.running_mean.cpu().numpy().astype(np.float32)
            out[f"{layer.name}.running_var"] = bn.running_var.cpu().numpy().astype(np.float32)
            out[f"{layer.name}.epsilon"] = np.array([bn.eps], dtype=np.float32)
    return out


def import_weights(model: GraphNet, weights) -> None:
    """Load exported tensors back into the torch modules (shape-checked)."""
    with torch.no_grad():
        for layer in model.spec.layers:
            if layer.kind == "conv":
                conv = model.blocks[layer.name]
                conv.weight.copy_(torch.from_numpy(np.asarray(weights[f"{layer.name}.kernel"])))
                conv.bias.copy_(torch.from_numpy(np.asarray(weights[f"{layer.name}.bias"])))
            elif layer.kind == "batch_norm":
                bn = model.blocks[layer.name]
                bn.weight.copy_(torch.from_numpy(np.asarray(weights[f"{layer.name}.gamma"])))
                bn.bias.copy_(torch.from_numpy(np.asarray(weights[f"{layer.name}.beta"])))
                bn.running_mean.copy_(
                    torch.from_numpy(np.asarray(weights[f"{layer.name}.running_mean"])))
                bn.running_var.copy_(
                    torch.from_numpy(np.asarray(weights[f"{layer.name}.running_var"])))
                bn.eps = float(np.asarray(weights[f"{layer.name}.epsilon"]).reshape(-1)[0])


def forward_reference(spec: Spec, weights, block: np.ndarray) -> np.ndarray:
    """Inference-mode forward of one (H, W) block; output clamped to [0, 1].

    Same contract as the deployment engine; used by the cross-component
    parity harness.
    """
    c, h, w = spec.input_shape
    block = np.asarray(block, dtype=np.float32)
    if block.shape != (h, w):
        raise ValueError(f"block shape {block.shape} does not match spec input {(h, w)}")
    model = GraphNet(spec)
    import_weights(model, weights)
    model.eval()
    x = torch.from_numpy(block)[None, None, :, :]
    if c != 1:
        x = x.repeat(1, c, 1, 1)
    with torch.no_grad():
        y = model(x)
    return np.clip(y[0, 0].numpy(), 0.0, 1.0).astype(np.float32)
