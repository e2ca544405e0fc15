"""Training entry point: reads a dataset manifest, writes HWF1 weights."""

import argparse
import sys

from .data import DataError, load_blocks
from .train import TrainConfig, train_and_export


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hologlyph-train",
        description="Train a block-restoration network on a generated dataset.")
    parser.add_argument("--manifest", required=True,
                        help="path to the dataset manifest (JSONL); block paths resolve "
                             "relative to it")
    parser.add_argument("--arch", default="unet", choices=("unet", "resnet"),
                        help="network architecture (default: unet)")
    parser.add_argument("--out", required=True, help="output HWF1 weight file")
    parser.add_argument("--spec-out", required=True, help="output network spec sidecar (JSON)")
    parser.add_argument("--history", required=True, help="output per-epoch loss history file")
    parser.add_argument("--batch-size", type=int, default=50, help="minibatch size (default: 50)")
    parser.add_argument("--lr", type=float, default=1e-3,
                        help="Adam learning rate (default: 1e-3)")
    parser.add_argument("--patience", type=int, default=10,
                        help="early-stopping patience in epochs on validation loss (default: 10)")
    parser.add_argument("--max-epochs", type=int, default=200,
                        help="hard epoch cap (default: 200)")
    parser.add_argument("--seed", type=int, default=0, help="training seed (default: 0)")
    parser.add_argument("--device", default="cpu", help="torch device (default: cpu)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = TrainConfig(architecture=args.arch, batch_size=args.batch_size,
                         learning_rate=args.lr, patience=args.patience,
                         max_epochs=args.max_epochs, seed=args.seed, device=args.device)
    try:
        train_set = load_blocks(args.manifest, "train")
        val_set = load_blocks(args.manifest, "val")
    except (DataError, OSError) as exc:
        print(f"hologlyph-train: {exc}", file=sys.stderr)
        return 2
    print(f"training {config.architecture}: {len(train_set)} train / {len(val_set)} val blocks, "
          f"batch {config.batch_size}, lr {config.learning_rate}, patience {config.patience}")
    history = train_and_export(train_set, val_set, config,
                               args.out, args.spec_out, args.history)
    print(f"stopped after epoch {history.stopped_epoch} "
          f"(best validation loss {min(history.val_loss):.3e} at epoch {history.best_epoch})")
    print(f"weights -> {args.out}; spec -> {args.spec_out}; history -> {args.history}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
