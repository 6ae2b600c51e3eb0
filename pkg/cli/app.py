import argparse
import sys
from typing import Callable, Dict, List, Optional

from cli import commands
from config.settings import settings
from datasets.presets import preset_names
from rounding.errors import SpecRoundError
from utils.logger import logger, setup_logging

# ============================================================================
# COMMAND-LINE APPLICATION
# ============================================================================
# Builds the argparse surface and maps outcomes to exit codes:
# 0 success, 1 pipeline error (or a replay mismatch), 2 usage error.

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _similarity_fn(text: str) -> str:
    try:
        commands.parse_similarity_fn(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc
    return text


def _preset(text: str) -> str:
    if text not in preset_names():
        raise argparse.ArgumentTypeError(f"choose from {', '.join(preset_names())}")
    return text


def _grid(text: str) -> List[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated numbers: {exc}") from exc


def _add_input(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--points", help="CSV of points, optional label column last")
    group.add_argument("--similarity", help="CSV of a precomputed n x n similarity matrix")
    group.add_argument("--preset", type=_preset, help="generate a named preset data set")
    parser.add_argument(
        "--similarity-fn", type=_similarity_fn, help="knn:<k> or gaussian:<sigma>"
    )
    parser.add_argument("--data-seed", type=int, default=0, help="generator seed for --preset")
    parser.add_argument(
        "--size-scale", type=float, default=1.0, help="point-count scale for --preset"
    )
    parser.add_argument(
        "--labels",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="whether the last CSV column holds true labels (default: detect from header)",
    )


def _add_method(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--method", choices=["ltm", "naive", "kmeans"], default="ltm")
    parser.add_argument("--K", type=int, help="leading eigenvectors (default: settings)")
    parser.add_argument("--delta", type=float, help="binarization confidence in (0, 1)")
    parser.add_argument("--k", type=int, help="cluster count for --method kmeans")
    parser.add_argument("--restarts", type=int, help="EM / k-means restarts")
    parser.add_argument("--seed", type=int, help="seed of the rounding method")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specround", description="Model-based rounding for spectral clustering"
    )
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING, ERROR")
    parser.add_argument("--log-format", choices=["text", "json"], default=None)
    parser.add_argument("--log-file", default=None, help="also write logs to this file")
    parser.add_argument("--threads", type=int, default=None, help="parallel workers")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a preset data set as CSV")
    gen.add_argument("--preset", type=_preset, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--size-scale", type=float, default=1.0)

    eigen = sub.add_parser("eigen", help="write the leading eigenpairs of L_rw")
    _add_input(eigen)
    eigen.add_argument("--K", type=int)
    eigen.add_argument("--values", required=True)
    eigen.add_argument("--vectors", required=True)
    eigen.add_argument("--delta", type=float)
    eigen.add_argument("--binary", help="also write the binarized vectors here")

    cluster = sub.add_parser("cluster", help="cluster one input")
    _add_input(cluster)
    _add_method(cluster)
    cluster.add_argument("--out", help="result JSON (default: stdout)")
    cluster.add_argument("--record", help="run record JSON for replay")
    cluster.add_argument("--svg", help="directory for SVG plots")
    cluster.add_argument("--svg-vectors", type=int, default=4)

    sweep = sub.add_parser("sweep", help="cluster across a parameter grid")
    _add_input(sweep, required=False)
    _add_method(sweep)
    sweep.add_argument("--axis", choices=["delta", "K", "noise"], required=True)
    sweep.add_argument("--grid", type=_grid, required=True, help="comma-separated values")
    sweep.add_argument(
        "--runs", type=int, default=1, help="runs per grid value, seeds seed..seed+runs-1"
    )
    sweep.add_argument("--out", required=True)
    sweep.add_argument("--summary", help="per-value mean/std CSV")

    evaluate = sub.add_parser("eval", help="score a partition against the truth")
    evaluate.add_argument("--pred", required=True)
    evaluate.add_argument("--truth", required=True)

    replay = sub.add_parser("replay", help="re-run a run record and compare partitions")
    replay.add_argument("record_file")
    return parser


def _check_usage(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    """Flag combinations argparse cannot express; parser.error exits with 2"""
    if getattr(args, "similarity", None) is not None and args.similarity_fn is not None:
        parser.error("--similarity-fn does not apply to a precomputed --similarity matrix")
    if args.command in ("cluster", "sweep") and args.method == "kmeans" and args.k is None:
        parser.error("--method kmeans requires --k")
    if args.command == "sweep":
        inputs = ("points", "similarity", "preset")
        has_input = any(getattr(args, name) is not None for name in inputs)
        if args.axis == "noise" and has_input:
            parser.error("--axis noise generates the noisy ladder; drop the input flag")
        if args.axis != "noise" and not has_input:
            parser.error("one of --points, --similarity, --preset is required")
        if args.runs < 1:
            parser.error("--runs must be at least 1")
    if args.threads is not None and args.threads < 1:
        parser.error("--threads must be at least 1")


def _configure(args: argparse.Namespace) -> None:
    if args.threads is not None:
        settings.threads = args.threads
    setup_logging(
        level=args.log_level or settings.log_level,
        fmt=args.log_format or settings.log_format,
        log_file=args.log_file or settings.log_file,
    )


HANDLERS: Dict[str, Callable[[argparse.Namespace], object]] = {
    "gen": commands.cmd_gen,
    "eigen": commands.cmd_eigen,
    "cluster": commands.cmd_cluster,
    "sweep": commands.cmd_sweep,
    "eval": commands.cmd_eval,
    "replay": commands.cmd_replay,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run the subcommand and return the exit code"""
    parser = build_parser()
    args = parser.parse_args(argv)
    _check_usage(parser, args)
    _configure(args)

    try:
        outcome = HANDLERS[args.command](args)
    except SpecRoundError as exc:
        logger.error(str(exc))
        return EXIT_FAILURE

    if args.command == "replay" and outcome is False:
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
