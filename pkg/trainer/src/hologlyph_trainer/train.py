"""Training loop: Adam on mean squared error with early stopping.

The exported weights are the best-validation-loss snapshot; batch-norm
inference statistics are the running averages accumulated during training.
"""

import copy
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
from torch import nn

from . import hwf1, netspec
from .data import BlockSet
from .model import GraphNet, export_weights


@dataclass
class TrainConfig:
    architecture: str = "unet"
    batch_size: int = 50
    learning_rate: float = 1e-3
    patience: int = 10
    max_epochs: int = 200
    seed: int = 0
    device: str = "cpu"
    spec: netspec.Spec | None = None  # explicit graph; None picks the canonical one

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.patience < 1:
            raise ValueError(f"patience must be >= 1, got {self.patience}")

    def resolve_spec(self) -> netspec.Spec:
        if self.spec is not None:
            return self.spec
        if self.architecture == "unet":
            return netspec.build_unet()
        if self.architecture == "resnet":
            return netspec.build_resnet()
        raise ValueError(f"unknown architecture {self.architecture!r}")


@dataclass
class History:
    train_loss: list = field(default_factory=list)
    val_loss: list = field(default_factory=list)
    stopped_epoch: int = 0
    best_epoch: int = 0

    def save(self, path, config: TrainConfig) -> None:
        lines = [
            f"# architecture: {config.architecture}",
            f"# batch_size: {config.batch_size}",
            f"# learning_rate: {config.learning_rate}",
            f"# patience: {config.patience}",
            f"# seed: {config.seed}",
            f"# best_epoch: {self.best_epoch}",
            "epoch\ttrain_loss\tval_loss",
        ]
        for i, (tr, va) in enumerate(zip(self.train_loss, self.val_loss), start=1):
            lines.append(f"{i}\t{tr:.8e}\t{va:.8e}")
        Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def _epoch_batches(n: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(n, generator=generator)
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def train(train_set: BlockSet, val_set: BlockSet, config: TrainConfig) -> tuple[GraphNet, History]:
    """Fit the network on block pairs; returns the best-epoch model and history."""
    spec = config.resolve_spec()
    c, h, w = spec.input_shape
    for name, blocks in (("train", train_set), ("val", val_set)):
        got = tuple(blocks.inputs.shape[1:])
        if got != (1, h, w) or blocks.targets.shape != blocks.inputs.shape:
            raise ValueError(
                f"{name} blocks {got} do not match the network input shape {(1, h, w)}")
    torch.manual_seed(config.seed)
    device = torch.device(config.device)
    model = GraphNet(spec).to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.MSELoss()

    x_train = torch.from_numpy(train_set.inputs).to(device)
    y_train = torch.from_numpy(train_set.targets).to(device)
    x_val = torch.from_numpy(val_set.inputs).to(device)
    y_val = torch.from_numpy(val_set.targets).to(device)

    shuffle = torch.Generator().manual_seed(config.seed)
    history = History()
    best_val = float("inf")
    best_state = None
    since_best = 0

    for epoch in range(1, config.max_epochs + 1):
        model.train()
        total, seen = 0.0, 0
        for idx in _epoch_batches(len(train_set), config.batch_size, shuffle):
            optimizer.zero_grad()
            out = model(x_train[idx])
            loss = loss_fn(out, y_train[idx])
            loss.backward()
            optimizer.step()
            total += float(loss.detach()) * len(idx)
            seen += len(idx)
        train_loss = total / seen

        model.eval()
        with torch.no_grad():
            val_total, val_seen = 0.0, 0
            for start in range(0, len(val_set), config.batch_size):
                xb = x_val[start:start + config.batch_size]
                yb = y_val[start:start + config.batch_size]
                val_total += float(loss_fn(model(xb), yb)) * len(xb)
                val_seen += len(xb)
            val_loss = val_total / val_seen

        history.train_loss.append(train_loss)
        history.val_loss.append(val_loss)
        history.stopped_epoch = epoch

        if val_loss < best_val:
            best_val = val_loss
            history.best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
            since_best = 0
        else:
            since_best += 1
            if since_best >= config.patience:
                break

    if best_state is not None:
        model.load_state_dict(best_state)
    return model, history


def train_and_export(train_set: BlockSet, val_set: BlockSet, config: TrainConfig,
                     weights_path, spec_path, history_path) -> History:
    """Full job: fit, then write HWF1 weights, the spec sidecar, and the history."""
    model, history = train(train_set, val_set, config)
    hwf1.save(export_weights(model), weights_path)
    netspec.dump(model.spec, spec_path)
    history.save(history_path, config)
    return history
