"""Command line front end: train on a pair directory, evaluate a checkpoint.

Exit codes: 0 success, 2 bad settings or usage, 3 unreadable or malformed
data, 1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback

from .data import ManifestError
from .evaluate import evaluate
from .train import TrainSettings, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gan-harness",
        description="Train and score a Pix2Pix model on an exported tile-pair directory.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train on the manifest's train split")
    p_train.add_argument("pair_dir", help="directory holding manifest.json and pairs/")
    p_train.add_argument("--out", required=True, help="directory for checkpoint and loss log")
    p_train.add_argument("--epochs", type=int, default=2)
    p_train.add_argument("--batch-size", type=int, default=2)
    p_train.add_argument("--buffer-size", type=int, default=200)
    p_train.add_argument("--seed", type=int, default=0)

    p_eval = sub.add_parser("evaluate", help="average PSNR/SSIM over one split")
    p_eval.add_argument("pair_dir", help="directory holding manifest.json and pairs/")
    p_eval.add_argument("--checkpoint", help="checkpoint.pt written by train")
    p_eval.add_argument(
        "--oracle",
        action="store_true",
        help="score each target against itself instead of a checkpoint",
    )
    p_eval.add_argument("--split", choices=["train", "test"], default="test")
    p_eval.add_argument("--out", help="also write the report to this JSON file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "train":
            settings = TrainSettings(
                epochs=args.epochs,
                batch_size=args.batch_size,
                buffer_size=args.buffer_size,
                seed=args.seed,
            )
            checkpoint = train(args.pair_dir, settings, args.out)
            print(f"checkpoint written to {checkpoint}")
        else:
            if args.oracle == (args.checkpoint is not None):
                parser.error("pass exactly one of --checkpoint or --oracle")
            report = evaluate(args.checkpoint, args.pair_dir, args.split, args.out)
            print(json.dumps(report, sort_keys=True))
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ManifestError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
