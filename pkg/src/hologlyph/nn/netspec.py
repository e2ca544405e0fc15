"""Network architecture descriptions and the JSON sidecar format.

A network is a list of named layers in topological order; each layer names
its inputs (earlier layers, or the pseudo-source ``@input``).  The layer
kinds, their parameters, and the sidecar schema are shared verbatim with the
training component, so a spec written by either side loads in the other.
"""

import json
from dataclasses import dataclass, field

INPUT = "@input"

LAYER_KINDS = (
    "conv",
    "batch_norm",
    "relu",
    "max_pool_2x2",
    "upsample_2x_nearest",
    "concat_skip",
    "residual_add",
)

NETSPEC_FORMAT = "hologlyph-netspec"
NETSPEC_VERSION = 1


class NetworkSpecError(ValueError):
    pass


@dataclass(frozen=True)
class LayerSpec:
    name: str
    kind: str
    inputs: tuple[str, ...]
    filters: int | None = None
    kernel_size: int | None = None

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise NetworkSpecError(f"layer {self.name}: unknown kind {self.kind!r}")
        if self.kind == "conv":
            if not self.filters or not self.kernel_size:
                raise NetworkSpecError(f"layer {self.name}: conv needs filters and kernel_size")
        elif self.filters is not None or self.kernel_size is not None:
            raise NetworkSpecError(f"layer {self.name}: only conv layers take filters/kernel_size")
        n_in = {"concat_skip": 2, "residual_add": 2}.get(self.kind, 1)
        if self.kind == "concat_skip":
            if len(self.inputs) < 2:
                raise NetworkSpecError(f"layer {self.name}: concat_skip needs >= 2 inputs")
        elif len(self.inputs) != n_in:
            raise NetworkSpecError(
                f"layer {self.name}: {self.kind} takes {n_in} input(s), got {len(self.inputs)}")


@dataclass(frozen=True)
class NetworkSpec:
    architecture: str
    layers: tuple[LayerSpec, ...]
    input_shape: tuple[int, int, int] = (1, 128, 128)
    output: str = field(default="")

    def __post_init__(self):
        if self.architecture not in ("unet", "resnet"):
            raise NetworkSpecError(f"unknown architecture {self.architecture!r}")
        names = [layer.name for layer in self.layers]
        if len(set(names)) != len(names):
            raise NetworkSpecError("layer names must be unique")
        seen = {INPUT}
        for layer in self.layers:
            for src in layer.inputs:
                if src not in seen:
                    raise NetworkSpecError(
                        f"layer {layer.name}: input {src!r} is not an earlier layer")
            seen.add(layer.name)
        if self.output not in seen or self.output == INPUT:
            raise NetworkSpecError(f"output layer {self.output!r} is not defined")

    def layer(self, name: str) -> LayerSpec:
        for layer in self.layers:
            if layer.name == name:
                return layer
        raise KeyError(name)


def infer_shapes(spec: NetworkSpec) -> dict[str, tuple[int, int, int]]:
    """Propagate (C, H, W) shapes through the graph; raises on inconsistency."""
    shapes: dict[str, tuple[int, int, int]] = {INPUT: spec.input_shape}
    for layer in spec.layers:
        ins = [shapes[src] for src in layer.inputs]
        c, h, w = ins[0]
        if layer.kind == "conv":
            out = (layer.filters, h, w)
        elif layer.kind == "max_pool_2x2":
            if h % 2 or w % 2:
                raise NetworkSpecError(f"layer {layer.name}: pooling odd dims {h}x{w}")
            out = (c, h // 2, w // 2)
        elif layer.kind == "upsample_2x_nearest":
            out = (c, 2 * h, 2 * w)
        elif layer.kind == "concat_skip":
            if any(s[1:] != (h, w) for s in ins):
                raise NetworkSpecError(f"layer {layer.name}: concat spatial dims disagree")
            out = (sum(s[0] for s in ins), h, w)
        elif layer.kind == "residual_add":
            if ins[0] != ins[1]:
                raise NetworkSpecError(
                    f"layer {layer.name}: residual add over unequal shapes {ins[0]} vs {ins[1]}")
            out = ins[0]
        else:  # relu, batch_norm
            out = ins[0]
        shapes[layer.name] = out
    return shapes


def expected_parameters(spec: NetworkSpec) -> dict[str, tuple[int, ...]]:
    """Name -> shape of every weight tensor the spec requires."""
    shapes = infer_shapes(spec)
    params: dict[str, tuple[int, ...]] = {}
    for layer in spec.layers:
        in_c = shapes[layer.inputs[0]][0]
        if layer.kind == "conv":
            params[f"{layer.name}.kernel"] = (layer.filters, in_c, layer.kernel_size, layer.kernel_size)
            params[f"{layer.name}.bias"] = (layer.filters,)
        elif layer.kind == "batch_norm":
            for p in ("gamma", "beta", "running_mean", "running_var"):
                params[f"{layer.name}.{p}"] = (in_c,)
            params[f"{layer.name}.epsilon"] = (1,)
    return params


def validate_structure(spec: NetworkSpec) -> None:
    """Architecture-specific sanity: skips for unet, shape-matched adds for resnet."""
    shapes = infer_shapes(spec)
    out_layer = spec.layer(spec.output)
    if spec.architecture == "unet":
        if out_layer.kind != "conv" or out_layer.filters != 1 or out_layer.kernel_size != 1:
            raise NetworkSpecError("unet output layer must be a 1-filter 1x1 conv")
        pools = [l for l in spec.layers if l.kind == "max_pool_2x2"]
        concats = [l for l in spec.layers if l.kind == "concat_skip"]
        if len(pools) != len(concats):
            raise NetworkSpecError(
                f"unet needs one skip concat per down-sampling level "
                f"({len(pools)} pools vs {len(concats)} concats)")
        pre_pool = {l.inputs[0] for l in pools}
        skip_sources = set()
        for cat in concats:
            skip_sources.update(cat.inputs)
        if not pre_pool <= skip_sources:
            missing = sorted(pre_pool - skip_sources)
            raise NetworkSpecError(f"unet down-sampled tensors lack skip targets: {missing}")
    elif spec.architecture == "resnet":
        if not any(l.kind == "residual_add" for l in spec.layers):
            raise NetworkSpecError("resnet spec has no residual_add layers")
        for l in spec.layers:
            if l.kind == "residual_add" and shapes[l.inputs[0]] != shapes[l.inputs[1]]:
                raise NetworkSpecError(f"layer {l.name}: residual shapes differ")


# ---------------------------------------------------------------------------
# Canonical architectures.  Filter counts are data: alternative widths or
# depths are just different spec instances.
# ---------------------------------------------------------------------------

def _block(layers: list[LayerSpec], prefix: str, source: str, filters: int) -> str:
    """Two rounds of batch_norm -> 3x3 conv -> relu; returns the output layer name."""
    cur = source
    for i in (1, 2):
        layers.append(LayerSpec(f"{prefix}_bn{i}", "batch_norm", (cur,)))
        layers.append(LayerSpec(f"{prefix}_conv{i}", "conv", (f"{prefix}_bn{i}",),
                                filters=filters, kernel_size=3))
        layers.append(LayerSpec(f"{prefix}_relu{i}", "relu", (f"{prefix}_conv{i}",)))
        cur = f"{prefix}_relu{i}"
    return cur


def default_unet(filters: tuple[int, ...] = (32, 64, 128),
                 input_shape: tuple[int, int, int] = (1, 128, 128)) -> NetworkSpec:
    """Encoder/decoder with skip concatenations and a 1-filter 1x1 output conv.

    ``filters`` lists the encoder widths followed by the bottleneck width;
    the decoder mirrors the encoder.
    """
    if len(filters) < 2:
        raise NetworkSpecError("unet needs at least one encoder level plus a bottleneck")
    enc_filters, mid_filters = filters[:-1], filters[-1]
    layers: list[LayerSpec] = []
    skips = []
    cur = INPUT
    for level, f in enumerate(enc_filters, start=1):
        cur = _block(layers, f"enc{level}", cur, f)
        skips.append(cur)
        layers.append(LayerSpec(f"pool{level}", "max_pool_2x2", (cur,)))
        cur = f"pool{level}"
    cur = _block(layers, "mid", cur, mid_filters)
    for level in range(len(enc_filters), 0, -1):
        layers.append(LayerSpec(f"up{level}", "upsample_2x_nearest", (cur,)))
        layers.append(LayerSpec(f"cat{level}", "concat_skip", (f"up{level}", skips[level - 1])))
        cur = _block(layers, f"dec{level}", f"cat{level}", enc_filters[level - 1])
    layers.append(LayerSpec("out_conv", "conv", (cur,), filters=1, kernel_size=1))
    spec = NetworkSpec(architecture="unet", layers=tuple(layers),
                       input_shape=input_shape, output="out_conv")
    validate_structure(spec)
    return spec


def default_resnet(width: int = 32, modules: int = 4,
                   input_shape: tuple[int, int, int] = (1, 128, 128)) -> NetworkSpec:
    """A stem conv, ``modules`` shortcut modules, and a 1-filter 1x1 output conv.

    Each module is batch_norm -> (conv -> batch_norm -> relu) x2 -> add-back.
    """
    layers: list[LayerSpec] = [
        LayerSpec("stem_conv", "conv", (INPUT,), filters=width, kernel_size=3)]
    cur = "stem_conv"
    for m in range(1, modules + 1):
        p = f"a{m}"
        entry = cur
        layers.append(LayerSpec(f"{p}_bn", "batch_norm", (entry,)))
        inner = f"{p}_bn"
        for i in (1, 2):
            layers.append(LayerSpec(f"{p}_conv{i}", "conv", (inner,),
                                    filters=width, kernel_size=3))
            layers.append(LayerSpec(f"{p}_bn{i}", "batch_norm", (f"{p}_conv{i}",)))
            layers.append(LayerSpec(f"{p}_relu{i}", "relu", (f"{p}_bn{i}",)))
            inner = f"{p}_relu{i}"
        layers.append(LayerSpec(f"{p}_add", "residual_add", (inner, entry)))
        cur = f"{p}_add"
    layers.append(LayerSpec("out_conv", "conv", (cur,), filters=1, kernel_size=1))
    spec = NetworkSpec(architecture="resnet", layers=tuple(layers),
                       input_shape=input_shape, output="out_conv")
    validate_structure(spec)
    return spec


# ---------------------------------------------------------------------------
# Sidecar serialization.
# ---------------------------------------------------------------------------

def to_json_dict(spec: NetworkSpec) -> dict:
    layers = []
    for l in spec.layers:
        entry = {"name": l.name, "kind": l.kind, "inputs": list(l.inputs)}
        if l.kind == "conv":
            entry["filters"] = l.filters
            entry["kernel_size"] = l.kernel_size
        layers.append(entry)
    return {
        "format": NETSPEC_FORMAT,
        "version": NETSPEC_VERSION,
        "architecture": spec.architecture,
        "input_shape": list(spec.input_shape),
        "layers": layers,
        "output": spec.output,
    }


def from_json_dict(doc: dict) -> NetworkSpec:
    if doc.get("format") != NETSPEC_FORMAT:
        raise NetworkSpecError(f"not a network spec document: format={doc.get('format')!r}")
    if doc.get("version") != NETSPEC_VERSION:
        raise NetworkSpecError(f"unsupported network spec version {doc.get('version')!r}")
    layers = tuple(
        LayerSpec(name=e["name"], kind=e["kind"], inputs=tuple(e["inputs"]),
                  filters=e.get("filters"), kernel_size=e.get("kernel_size"))
        for e in doc["layers"])
    spec = NetworkSpec(architecture=doc["architecture"], layers=layers,
                       input_shape=tuple(doc["input_shape"]), output=doc["output"])
    validate_structure(spec)
    return spec


def save_netspec(spec: NetworkSpec, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(to_json_dict(spec), fh, indent=2)
        fh.write("\n")


def load_netspec(path) -> NetworkSpec:
    with open(path, "r", encoding="ascii") as fh:
        return from_json_dict(json.load(fh))
