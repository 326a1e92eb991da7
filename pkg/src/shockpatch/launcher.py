"""Command-line entry point for shockpatch."""

from __future__ import annotations

import argparse
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from shockpatch import __version__
from shockpatch.harness.examples import EXAMPLE_NUMBERS, load_example
from shockpatch.harness.runner import execute
from shockpatch.logging import add_file_handler, configure_logger
from shockpatch.settings import (
    get_settings,
    load_run_config,
    logger,
    parse_run_config,
)
from shockpatch.typing.config import RunConfig

MODES = ("full", "patches", "compare")


def gracefully_exit(message: str) -> int:
    """Log an error message and return the failure exit status."""
    logger.error(message)
    return 1


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--mode", choices=MODES, help="Override the run mode.")
    parser.add_argument("--out-dir", type=Path, help="Directory for output files.")
    parser.add_argument("--seed", type=int, help="Override the coefficient seed.")
    parser.add_argument(
        "--snapshot-dt", type=float, help="Override the snapshot interval."
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with its three subcommands."""
    parser = argparse.ArgumentParser(
        prog="shockpatch",
        description="Moving and merging patch simulations of lattice Burgers flow.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument(
        "--log-level",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
        type=str.upper,
        help="Console log level (defaults to SHOCKPATCH_LOG_LEVEL).",
    )
    parser.add_argument("--log-file", type=Path, help="Also write JSON logs here.")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run a configuration file.")
    run.add_argument("config", type=Path)
    _add_run_options(run)

    example = commands.add_parser("example", help="Run a built-in example.")
    example.add_argument("number", type=int, choices=EXAMPLE_NUMBERS)
    _add_run_options(example)

    validate = commands.add_parser("validate", help="Check a configuration file.")
    validate.add_argument("config", type=Path)
    return parser


def apply_overrides(config: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Apply command-line overrides and validate the result again.

    Args:
        config (RunConfig): Configuration as loaded.
        args (argparse.Namespace): Parsed command line.

    Raises:
        ValueError: if an override breaks an invariant.

    Returns:
        RunConfig: The configuration to run.
    """
    payload: dict[str, Any] = config.model_dump(mode="json", by_alias=True)
    if args.mode is not None:
        payload["mode"] = args.mode
    if args.seed is not None:
        payload["heterogeneity"]["seed"] = args.seed
    if args.snapshot_dt is not None:
        payload["snapshot_dt"] = args.snapshot_dt
    return parse_run_config(payload)


def resolve_out_dir(config: RunConfig, requested: Path | None) -> Path:
    """Pick the output directory: flag, then config, then settings default."""
    if requested is not None:
        return requested
    if config.output.out_dir is not None:
        return Path(config.output.out_dir)
    return get_settings().out_dir / config.name


def _configure_logging(args: argparse.Namespace) -> None:
    settings = get_settings()
    if args.log_level is not None:
        configure_logger.cache_clear()
        configure_logger(
            log_level=args.log_level, human_readable=settings.human_readable_logs
        )
    if args.log_file is not None:
        add_file_handler(args.log_file, args.log_level)


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "validate":
        config = load_run_config(args.config)
        logger.info(
            "configuration valid",
            name=config.name,
            lattice_intervals=config.lattice_intervals,
            snapshots=len(config.snapshot_times()),
        )
        return 0

    if args.command == "example":
        config = load_example(args.number)
    else:
        config = load_run_config(args.config)
    config = apply_overrides(config, args)
    settings = get_settings()
    result = execute(
        config,
        resolve_out_dir(config, args.out_dir),
        parallel=settings.parallel_compare,
        progress_every=settings.progress_every,
    )
    for path in result.files:
        print(path)  # noqa: T201
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments and run the selected subcommand.

    Args:
        argv (Sequence[str] | None): Arguments without the program name; defaults
            to ``sys.argv[1:]``.

    Returns:
        int: Exit status, 0 on success and 1 on configuration or runtime errors.
    """
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        return _dispatch(args)
    except (ValueError, RuntimeError) as exc:
        return gracefully_exit(str(exc))


def launch() -> None:
    """Console script entry point."""
    sys.exit(main())


if __name__ == "__main__":
    launch()
