"""Shared network-spec sidecar format (reader/writer) and the canonical graphs.

The schema is the toolkit-wide contract: a JSON document with ordered layers,
each naming its inputs (`@input` is the block itself).  This module is an
independent implementation of that contract; specs written here load in the
inference engine and vice versa.
"""

import json
from dataclasses import dataclass

INPUT = "@input"
FORMAT = "hologlyph-netspec"
VERSION = 1

KINDS = ("conv", "batch_norm", "relu", "max_pool_2x2", "upsample_2x_nearest",
         "concat_skip", "residual_add")


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class Layer:
    name: str
    kind: str
    inputs: tuple[str, ...]
    filters: int | None = None
    kernel_size: int | None = None


@dataclass(frozen=True)
class Spec:
    architecture: str
    layers: tuple[Layer, ...]
    input_shape: tuple[int, int, int]
    output: str


def check(spec: Spec) -> dict[str, tuple[int, int, int]]:
    """Validate the graph and return per-layer (C, H, W) shapes."""
    if spec.architecture not in ("unet", "resnet"):
        raise SpecError(f"unknown architecture {spec.architecture!r}")
    shapes: dict[str, tuple[int, int, int]] = {INPUT: tuple(spec.input_shape)}
    for layer in spec.layers:
        if layer.kind not in KINDS:
            raise SpecError(f"{layer.name}: unknown kind {layer.kind!r}")
        if layer.name in shapes:
            raise SpecError(f"duplicate layer name {layer.name!r}")
        missing = [s for s in layer.inputs if s not in shapes]
        if missing:
            raise SpecError(f"{layer.name}: inputs {missing} not defined yet")
        ins = [shapes[s] for s in layer.inputs]
        c, h, w = ins[0]
        if layer.kind == "conv":
            if not layer.filters or not layer.kernel_size:
                raise SpecError(f"{layer.name}: conv needs filters and kernel_size")
            shapes[layer.name] = (layer.filters, h, w)
        elif layer.kind == "max_pool_2x2":
            if h % 2 or w % 2:
                raise SpecError(f"{layer.name}: cannot pool odd dims {h}x{w}")
            shapes[layer.name] = (c, h // 2, w // 2)
        elif layer.kind == "upsample_2x_nearest":
            shapes[layer.name] = (c, 2 * h, 2 * w)
        elif layer.kind == "concat_skip":
            if len(ins) < 2 or any(s[1:] != (h, w) for s in ins):
                raise SpecError(f"{layer.name}: bad concat inputs")
            shapes[layer.name] = (sum(s[0] for s in ins), h, w)
        elif layer.kind == "residual_add":
            if len(ins) != 2 or ins[0] != ins[1]:
                raise SpecError(f"{layer.name}: residual shapes differ: {ins}")
            shapes[layer.name] = ins[0]
        else:
            shapes[layer.name] = ins[0]
    if spec.output not in shapes or spec.output == INPUT:
        raise SpecError(f"output {spec.output!r} is not a layer")
    return shapes


def load(path) -> Spec:
    with open(path, "r", encoding="ascii") as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT or doc.get("version") != VERSION:
        raise SpecError(f"{path}: not a version-{VERSION} {FORMAT} document")
    layers = tuple(Layer(e["name"], e["kind"], tuple(e["inputs"]),
                         e.get("filters"), e.get("kernel_size"))
                   for e in doc["layers"])
    spec = Spec(doc["architecture"], layers, tuple(doc["input_shape"]), doc["output"])
    check(spec)
    return spec


def dump(spec: Spec, path) -> None:
    check(spec)
    layers = []
    for l in spec.layers:
        entry = {"name": l.name, "kind": l.kind, "inputs": list(l.inputs)}
        if l.kind == "conv":
            entry["filters"] = l.filters
            entry["kernel_size"] = l.kernel_size
        layers.append(entry)
    doc = {"format": FORMAT, "version": VERSION, "architecture": spec.architecture,
           "input_shape": list(spec.input_shape), "layers": layers, "output": spec.output}
    with open(path, "w", encoding="ascii") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _block(layers: list[Layer], prefix: str, source: str, filters: int) -> str:
    cur = source
    for i in (1, 2):
        layers.append(Layer(f"{prefix}_bn{i}", "batch_norm", (cur,)))
        layers.append(Layer(f"{prefix}_conv{i}", "conv", (f"{prefix}_bn{i}",),
                            filters=filters, kernel_size=3))
        layers.append(Layer(f"{prefix}_relu{i}", "relu", (f"{prefix}_conv{i}",)))
        cur = f"{prefix}_relu{i}"
    return cur


def build_unet(filters: tuple[int, ...] = (32, 64, 128),
               input_shape: tuple[int, int, int] = (1, 128, 128)) -> Spec:
    enc, mid = filters[:-1], filters[-1]
    layers: list[Layer] = []
    skips = []
    cur = INPUT
    for level, f in enumerate(enc, start=1):
        cur = _block(layers, f"enc{level}", cur, f)
        skips.append(cur)
        layers.append(Layer(f"pool{level}", "max_pool_2x2", (cur,)))
        cur = f"pool{level}"
    cur = _block(layers, "mid", cur, mid)
    for level in range(len(enc), 0, -1):
        layers.append(Layer(f"up{level}", "upsample_2x_nearest", (cur,)))
        layers.append(Layer(f"cat{level}", "concat_skip", (f"up{level}", skips[level - 1])))
        cur = _block(layers, f"dec{level}", f"cat{level}", enc[level - 1])
    layers.append(Layer("out_conv", "conv", (cur,), filters=1, kernel_size=1))
    spec = Spec("unet", tuple(layers), input_shape, "out_conv")
    check(spec)
    return spec


def build_resnet(width: int = 32, modules: int = 4,
                 input_shape: tuple[int, int, int] = (1, 128, 128)) -> Spec:
    layers: list[Layer] = [Layer("stem_conv", "conv", (INPUT,), filters=width, kernel_size=3)]
    cur = "stem_conv"
    for m in range(1, modules + 1):
        p = f"a{m}"
        entry = cur
        layers.append(Layer(f"{p}_bn", "batch_norm", (entry,)))
        inner = f"{p}_bn"
        for i in (1, 2):
            layers.append(Layer(f"{p}_conv{i}", "conv", (inner,), filters=width, kernel_size=3))
            layers.append(Layer(f"{p}_bn{i}", "batch_norm", (f"{p}_conv{i}",)))
            layers.append(Layer(f"{p}_relu{i}", "relu", (f"{p}_bn{i}",)))
            inner = f"{p}_relu{i}"
        layers.append(Layer(f"{p}_add", "residual_add", (inner, entry)))
        cur = f"{p}_add"
    layers.append(Layer("out_conv", "conv", (cur,), filters=1, kernel_size=1))
    spec = Spec("resnet", tuple(layers), input_shape, "out_conv")
    check(spec)
    return spec
