"""Command-line entry point.

Example:

    exin --task regression --vocab vocab.json --model builtin:model.json \\
         --input reviews.jsonl --output reports.jsonl --format json

Model sources: ``builtin:<spec.json>`` for the built-in linear model,
``cmd:<argv>`` to spawn an external predictor process speaking
ei-predict/1 on its standard streams, ``tcp:<host>:<port>`` for a socket
endpoint. Setting the NO_COLOR environment variable disables ANSI
styling.
"""

from __future__ import annotations

import argparse
import os
import sys

from .effect import DEFAULT_TAU
from .pipeline import ConfigError, RunConfig, run
from .predictors import Task


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exin",
        description="Phrase-level positive/negative/neutral explanations for black-box text predictors.",
    )
    parser.add_argument("--task", required=True, choices=["regression", "classification"])
    parser.add_argument(
        "--num-classes",
        type=int,
        default=None,
        help="number of classes (classification only; default: taken from a builtin model spec)",
    )
    parser.add_argument(
        "--mode",
        choices=["exhaustive", "early-stop"],
        default=None,
        help="span scan strategy (default: exhaustive, auto early-stop on long sequences)",
    )
    parser.add_argument("--loss", choices=["mae", "mse"], default="mae")
    parser.add_argument("--max-gram", type=int, default=64, help="early-stop span length cap")
    parser.add_argument("--tau", type=float, default=DEFAULT_TAU, help="neutral threshold on EI values")
    parser.add_argument(
        "--focus-class",
        type=int,
        default=None,
        help="class whose labels drive rendering (default: the predicted class)",
    )
    parser.add_argument(
        "--model", required=True, help="builtin:<spec.json> | cmd:<argv> | tcp:<host>:<port>"
    )
    parser.add_argument("--vocab", required=True, help="vocabulary JSON path")
    parser.add_argument("--input", required=True, help="JSONL input: {\"id\"?, \"text\", \"label\"?}")
    parser.add_argument("--output", default=None, help="output path (default: stdout)")
    parser.add_argument("--format", choices=["json", "ansi", "html"], default="json")
    parser.add_argument(
        "--per-record-html",
        action="store_true",
        help="with --format html, write one <id>.html per record into --output (a directory)",
    )
    parser.add_argument(
        "--long-seq-threshold",
        type=int,
        default=512,
        help="token count above which auto mode switches to early-stop",
    )
    return parser


def _num_classes_from_model(args) -> int | None:
    if args.num_classes is not None:
        return args.num_classes
    if args.model.startswith("builtin:"):
        from .predictors import LinearPredictor

        return LinearPredictor.from_file(args.model[len("builtin:"):]).task.num_classes
    return None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.task == "classification":
            num_classes = _num_classes_from_model(args)
            if num_classes is None:
                print(
                    "fatal: --num-classes is required for classification with external models",
                    file=sys.stderr,
                )
                return 1
            task = Task.classification(num_classes)
        else:
            task = Task.regression()
        config = RunConfig(
            task=task,
            vocab_path=args.vocab,
            model=args.model,
            input_path=args.input,
            output_path=args.output,
            mode=args.mode,
            loss_kind=args.loss,
            max_gram=args.max_gram,
            tau=args.tau,
            long_seq_threshold=args.long_seq_threshold,
            format=args.format,
            per_record_html=args.per_record_html,
            color="NO_COLOR" not in os.environ,
            focus_class=args.focus_class,
        )
    except (ConfigError, OSError, ValueError) as exc:
        print(f"fatal: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
