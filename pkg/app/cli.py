"""
Command-Line Interface
Run exact, quantum and classical methods on a weighted DIMACS file.

Usage:
    python -m app.cli wmc data/sprinkler.cnf --t-bits 5 --shots 1000
    python -m app.cli mpe data/sprinkler.cnf --seed 7
    python -m app.cli map data/sprinkler.cnf --query 1,3
    python -m app.cli repro-sprinkler --out-dir results

Results go to stdout, logs to stderr. Exit codes: 0 success, 1 other
failure, 2 parse or input error, 3 unsatisfiable, 4 resource limit.
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from app import commands
from app.baselines.report import rows_to_csv
from app.config import settings
from app.errors import ResourceLimitError, UnsatisfiableError
from app.logic.dimacs import DimacsParseError
from app.schemas import REPORT_MODELS, RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE_ERROR = 2
EXIT_UNSATISFIABLE = 3
EXIT_RESOURCE_LIMIT = 4

COMMANDS = (
    "wmc", "count", "sample", "mpe", "map", "repro-sprinkler",
    "baselines", "vote-table", "dump-circuit", "schema",
)
_FILE_COMMANDS = ("wmc", "count", "sample", "mpe", "map", "baselines", "dump-circuit")


def _query_list(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Query must be comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="python -m app.cli",
        description="Quantum weighted model counting and constrained sampling on a state-vector simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name in _FILE_COMMANDS:
            p.add_argument("input", nargs="?", help="Weighted DIMACS file (sprinkler when omitted)")
        if name == "schema":
            p.add_argument("report", choices=sorted(REPORT_MODELS), help="Report model")
        p.add_argument("--seed", type=int, default=settings.SEED, help="Random seed")
        p.add_argument("--shots", type=int, default=settings.SHOTS, help="Shots / repetitions")
        p.add_argument("--t-bits", type=int, default=None, help="Counting bits (default ceil(n/2)+5)")
        p.add_argument("--method", choices=("all", "exact", "quantum", "classical"), default="all")
        p.add_argument("--query", type=_query_list, default=None, help="1-based query variables, e.g. 1,3")
        p.add_argument("--out-dir", default=settings.OUT_DIR, help="Output directory for files")
        p.add_argument("--format", choices=("json", "tsv"), default=settings.OUTPUT_FORMAT)
        p.add_argument("--qwmc-shots", type=int, default=None, help="QWMC shots feeding the samplers")
        p.add_argument("--power-backend", choices=("matrix", "gates"), default=None)
        p.add_argument("--samples", type=int, default=100_000, help="Classical estimator samples")
        p.add_argument("--trials", type=int, default=1000, help="Trials per vote-table cell")
        p.add_argument(
            "--gadget", choices=("oracle", "phase-oracle", "rot", "wg", "grover", "qft"), default="wg",
        )
        p.add_argument("--log-level", default=settings.LOG_LEVEL, help="Logging level")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        seed=args.seed,
        shots=args.shots,
        t_bits=args.t_bits,
        query=args.query,
        method=args.method,
        output_format=args.format,
        out_dir=args.out_dir,
        qwmc_shots=args.qwmc_shots,
        power_backend=args.power_backend,
        samples=args.samples,
        trials=args.trials,
        gadget=args.gadget,
        report=getattr(args, "report", None),
    )


def render(config: RunConfig, result) -> str:
    """Format a command result for stdout."""
    if isinstance(result, str):
        return result
    if isinstance(result, dict):
        return json.dumps(result, indent=2, sort_keys=True) + "\n"
    if isinstance(result, list):
        return rows_to_csv(result)
    if config.output_format == "tsv":
        return result.to_tsv()
    return result.model_dump_json(indent=2) + "\n"


def run(config: RunConfig):
    """Dispatch a RunConfig to its command."""
    handlers = {
        "wmc": commands.cmd_wmc,
        "count": commands.cmd_count,
        "sample": commands.cmd_sample,
        "mpe": commands.cmd_mpe,
        "map": commands.cmd_map,
        "repro-sprinkler": commands.cmd_repro_sprinkler,
        "baselines": commands.cmd_baselines,
        "vote-table": commands.cmd_vote_table,
        "dump-circuit": commands.cmd_dump_circuit,
    }
    if config.command == "schema":
        return commands.report_schema(config.report or "wmc")
    return handlers[config.command](config)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )

    try:
        config = config_from_args(args)
        logger.info(f"Running {config.command} (seed {config.seed})")
        output = render(config, run(config))
    except UnsatisfiableError as e:
        logger.error(f"Unsatisfiable: {e}")
        return EXIT_UNSATISFIABLE
    except (ResourceLimitError, MemoryError) as e:
        logger.error(f"Resource limit: {e}")
        return EXIT_RESOURCE_LIMIT
    except (DimacsParseError, ValidationError, ValueError) as e:
        logger.error(f"Invalid input: {e}")
        return EXIT_PARSE_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Command failed: {e}")
        return EXIT_FAILURE

    sys.stdout.write(output)
    sys.stdout.flush()
    logger.info(f"Finished {config.command}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
