# src/ssvlab/main.py

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv

from ssvlab import __version__
from ssvlab.core.config import settings
from ssvlab.core.errors import ConfigError, DomainError, SsvlabError
from ssvlab.schemas.manifest import CommandTag
from ssvlab.worker import (
    WORKFLOWS,
    load_experiment_config,
    new_run_dir,
    report_ordering,
    reproduce_workflow,
    with_overrides,
)

# Load environment variables
load_dotenv(dotenv_path=os.path.join(os.getcwd(), ".env"))

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1


def _seed_list(value: str) -> List[int]:
    try:
        return [int(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Seeds must be comma-separated integers, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssvlab", description="Self-similar-variable surrogate lab")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("solve", "Compute the reference solution and write reference.ssf"),
        ("train", "Train the physical and SSV heads on a reference"),
        ("eval", "Evaluate trained heads: RelMSE sweeps and triptychs"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="KEY=VALUE experiment file")
        cmd.add_argument("--seed", type=int, default=None, help="Override the config seed")
        cmd.add_argument("--out", default=None, help="Run directory")

    reproduce = sub.add_parser("reproduce", help="Solve, train and evaluate everything a figure needs")
    reproduce.add_argument("figure", help="Figure id (fig1, fig2, fig3, fig5, fig6, fig7)")
    reproduce.add_argument("--config", default=None, help="KEY=VALUE experiment file; system defaults otherwise")
    reproduce.add_argument("--seed", type=int, default=None, help="Override the config seed")
    reproduce.add_argument("--seeds", type=_seed_list, default=None, help="Comma-separated seeds, e.g. 0,1,2")
    reproduce.add_argument("--out", default=None, help="Root for the timestamped run directory")

    report = sub.add_parser("report", help="Aggregate finished runs into ordering.json")
    report.add_argument("runs", nargs="+", help="Run directories holding metrics_phys.csv / metrics_ssv.csv")
    report.add_argument("--out", default="ordering.json", help="Output JSON path")
    return parser


def _run_dir(args: argparse.Namespace, cfg) -> Path:
    if args.out:
        return Path(args.out)
    if cfg.out_dir:
        return Path(cfg.out_dir)
    return new_run_dir(settings.OUTPUT_DIR, f"{cfg.system.value}-{args.command}")


def dispatch(args: argparse.Namespace) -> None:
    if args.command == "report":
        path = report_ordering([Path(p) for p in args.runs], Path(args.out))
        logger.info(f"Ordering report written to {path}")
        return

    if args.command == "reproduce":
        cfg = load_experiment_config(args.config) if args.config else None
        run_dir, _ = reproduce_workflow(args.figure, cfg, seeds=args.seeds, out_root=args.out, seed=args.seed)
        logger.info(f"Reproduction finished in {run_dir}")
        return

    cfg = load_experiment_config(args.config, seed=args.seed)
    run_dir = _run_dir(args, cfg)
    if cfg.out_dir is None:
        cfg = with_overrides(cfg, out_dir=str(run_dir))
    WORKFLOWS[CommandTag(args.command)](cfg, run_dir)
    logger.info(f"{args.command} finished in {run_dir}")


def main(argv: Optional[List[str]] = None) -> int:
    """
    Command-line entry point.

    Exit codes: 0 success, 2 configuration error, 3 missing artifact,
    4 numerical abort, 1 anything else.
    """
    args = build_parser().parse_args(argv)

    # Configure logging
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL, logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
    )

    try:
        dispatch(args)
        return EXIT_OK
    except SsvlabError as e:
        logger.error(f"{type(e).__name__}: {e.message}")
        if e.diagnostic:
            logger.error(f"Diagnostic: {e.diagnostic}")
        return e.exit_code
    except DomainError as e:
        logger.error(f"Invalid input: {e}")
        return ConfigError.exit_code
    except Exception as e:
        logger.exception(f"Unexpected failure: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
