"""
Command Line
Runs one pipeline per subcommand from a YAML run file and writes its tables and documents.

Usage:
    python -m Controller.cli crossover --config data/configs/crossover.yaml --out out/crossover
"""

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
from pydantic import ValidationError

# Add project root to path for imports
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from dotenv import load_dotenv

from Controller.services import (
    ConfigError,
    NumericalError,
    OutputWriter,
    PipelineService,
    REQUIRED_BLOCKS,
    load_run_config,
    validation_error_lines,
)
from Readout import ReadoutSimulator

THREADS_ENV = "PNL_READOUT_THREADS"
DEFAULT_CONFIG_DIR = project_root / "data" / "configs"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="YAML run file (default: data/configs/<command>.yaml)")
    common.add_argument("--seed", type=int, help="Root seed, overrides the run file")
    common.add_argument("--out", help="Output directory, overrides the run file")
    common.add_argument("--format", choices=["csv", "json"], help="Table format, overrides the run file")
    common.add_argument("--threads", type=int, help=f"Simulation workers (fallback: ${THREADS_ENV}, then 1)")
    common.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--quiet", action="store_true", help="No status lines or progress bars")
    common.add_argument("--dump-raw", action="store_true", help="Also write raw per-shot counts (crossover)")

    parser = argparse.ArgumentParser(
        prog="python -m Controller.cli",
        description="Simulate, decompose and fit repetitive nuclear-spin-assisted ensemble readout.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in REQUIRED_BLOCKS:
        subparsers.add_parser(command, parents=[common], help=f"run the {command} pipeline")
    return parser


def resolve_threads(flag: Optional[int]) -> int:
    """--threads, then the environment variable, then 1."""
    if flag is not None:
        threads = flag
    else:
        raw = os.environ.get(THREADS_ENV, "").strip()
        if not raw:
            return 1
        try:
            threads = int(raw)
        except ValueError as exc:
            raise ConfigError(f"not an integer: {raw!r}", path=THREADS_ENV) from exc
    if threads < 1:
        raise ConfigError(f"must be at least 1, got {threads}", path="--threads")
    return threads


def _report(lines: Sequence[str]) -> None:
    for line in lines:
        print(f"   - {line}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point for the command line.

    Returns:
        0 on success, 2 for configuration errors, 3 for numerical failures.
    """
    load_dotenv(project_root / ".env")
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")
    say = (lambda *_: None) if args.quiet else print

    config_path = args.config
    if config_path is None and (DEFAULT_CONFIG_DIR / f"{args.command}.yaml").is_file():
        config_path = DEFAULT_CONFIG_DIR / f"{args.command}.yaml"

    try:
        threads = resolve_threads(args.threads)
        config = load_run_config(config_path, {"seed": args.seed, "out": args.out, "format": args.format})
        config.require(args.command)
    except ValidationError as exc:
        print("❌ Invalid run configuration:", file=sys.stderr)
        _report(validation_error_lines(exc))
        return EXIT_CONFIG
    except ConfigError as exc:
        print(f"❌ Invalid run configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    say(f"🚀 Running {args.command} (seed {config.seed}, {threads} thread{'s' if threads > 1 else ''})")
    progress = not args.quiet and sys.stderr.isatty()
    service = PipelineService(ReadoutSimulator(threads=threads, progress=progress), progress, args.dump_raw)
    try:
        output = service.run(args.command, config)
    except ValidationError as exc:
        print(f"❌ {args.command} rejected its parameters:", file=sys.stderr)
        _report(validation_error_lines(exc))
        return EXIT_CONFIG
    except (NumericalError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"❌ {args.command} failed numerically: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"❌ {args.command} rejected its parameters: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    writer = OutputWriter(Path(config.out), args.command, config.seed, config.sha256(), config.format)
    for name, frame in output.tables.items():
        say(f"📥 {writer.write_table(name, frame)}")
    for name, document in output.documents.items():
        say(f"📥 {writer.write_document(name, document)}")

    if output.failure:
        print(f"❌ {output.failure}", file=sys.stderr)
        print("⚠️  Outputs were written for inspection", file=sys.stderr)
        return EXIT_NUMERICAL
    say(f"✅ {args.command} completed: {len(writer.written)} files in {config.out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
