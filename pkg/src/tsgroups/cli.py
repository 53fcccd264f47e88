"""Command-line front end for the grouped time-series workflow.

Verbs mirror the pipeline stages: ingest, train, infer, report, plus
two self-contained checks (gradcheck, selftest). Exit codes: 0 success,
2 configuration problems, 3 missing or inconsistent files, 4 numeric
divergence or failed numeric audit.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import pipeline
from .pipeline import ArtifactError, ConfigError, PipelineConfig, load_config
from .types import DivergenceError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4


def _apply_overrides(config: PipelineConfig, args: argparse.Namespace) -> PipelineConfig:
    data = config.to_dict()
    if getattr(args, "dataset_root", None) is not None:
        data["paths"]["dataset_root"] = args.dataset_root
    if getattr(args, "out", None) is not None:
        data["paths"]["out_dir"] = args.out
    if getattr(args, "seed", None) is not None:
        data["ingest"]["seed"] = args.seed
        data["autoencoder"]["seed"] = args.seed
        data["classifier"]["seed"] = args.seed
    if getattr(args, "synthetic", False):
        data["ingest"]["synthetic"] = data["ingest"]["synthetic"] or {}
    if getattr(args, "epochs", None) is not None:
        data["autoencoder"]["epochs"] = args.epochs
    if getattr(args, "tau", None) is not None:
        data["cgf"]["tau"] = args.tau
    if getattr(args, "mapping", None) is not None:
        data["mapping"]["method"] = args.mapping
    if getattr(args, "baseline_only", False):
        data["train"]["baseline_only"] = True
    return PipelineConfig.from_dict(data)


def _load(args: argparse.Namespace) -> PipelineConfig:
    if getattr(args, "config", None) is not None:
        config = load_config(args.config)
    else:
        config = PipelineConfig()
    return _apply_overrides(config, args)


def _print(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tsgroups",
        description="Group-aware classification of windowed inertial time series.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug-level logging")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="run directory (overrides config)")
    common.add_argument("--seed", type=int, help="override every stage seed")

    p_ingest = sub.add_parser("ingest", parents=[common],
                              help="build train/test dataset archives")
    p_ingest.add_argument("--dataset-root", dest="dataset_root",
                          help="corpus root with one directory per session")
    p_ingest.add_argument("--synthetic", action="store_true",
                          help="generate the built-in synthetic corpus instead")

    p_train = sub.add_parser("train", parents=[common],
                             help="fit autoencoder, form groups, train models")
    p_train.add_argument("--epochs", type=int, help="autoencoder epoch override")
    p_train.add_argument("--tau", type=float, help="minimum new-group fraction")
    p_train.add_argument("--baseline-only", action="store_true", dest="baseline_only",
                         help="skip grouping; train the single model only")

    p_infer = sub.add_parser("infer", parents=[common],
                             help="group the test set, map groups, predict")
    p_infer.add_argument("--mapping", choices=["CR_CR", "AVG"],
                         help="mapping method override")
    p_infer.add_argument("--tau", type=float, help="minimum new-group fraction")
    p_infer.add_argument("--baseline-only", action="store_true", dest="baseline_only",
                         help="score the single baseline model instead")

    p_report = sub.add_parser("report", help="export CSV tables for a finished run")
    p_report.add_argument("--out", required=True, help="run directory to summarize")

    p_grad = sub.add_parser("gradcheck", help="finite-difference gradient audit")
    p_grad.add_argument("--seeds", type=int, default=5, help="number of random nets")
    p_grad.add_argument("--epsilon", type=float, default=1e-5, help="perturbation size")

    sub.add_parser("selftest", help="compare fast numerics against naive references")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        if args.command == "ingest":
            _print(pipeline.cmd_ingest(_load(args)))
        elif args.command == "train":
            _print(pipeline.cmd_train(_load(args)))
        elif args.command == "infer":
            _print(pipeline.cmd_infer(_load(args)))
        elif args.command == "report":
            _print(pipeline.cmd_report(args.out))
        elif args.command == "gradcheck":
            result = pipeline.cmd_gradcheck(args.seeds, args.epsilon)
            _print(result)
            if not result["ok"]:
                return EXIT_NUMERIC
        elif args.command == "selftest":
            result = pipeline.cmd_selftest()
            _print(result)
            if not result["ok"]:
                return EXIT_NUMERIC
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"numeric divergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ArtifactError, OSError, RuntimeError) as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
