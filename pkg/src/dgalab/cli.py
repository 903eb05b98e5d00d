"""``dgalab`` command line: generate, run, sweep, validate.

Config keys are passed as flags (``--rt.ee=22``) on top of an optional
``--config`` file. CSV goes to stdout unless ``--out`` is given; logs go to
stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import IO, Sequence

from dgalab import experiment
from dgalab.amcore.runtime import LivelockError
from dgalab.config import ConfigError, parse_config, parse_flags, valid_keys
from dgalab.graph import EdgeListError, generate_kronecker, save_edge_list
from dgalab.metrics import write_csv
from dgalab.models import ExperimentConfig, ExperimentResultModel

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_CONFIG_ERROR = 2


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="key=value or YAML config file")
    common.add_argument("--out", type=Path, help="output path (default: stdout)")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )

    parser = argparse.ArgumentParser(
        prog="dgalab",
        description="Distributed graph algorithms on a simulated active-message runtime.",
        epilog="Config keys: " + ", ".join(valid_keys()),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="write a Kronecker edge list")
    sub.add_parser("run", parents=[common], help="run one configuration, emit CSV")
    sweep = sub.add_parser("sweep", parents=[common], help="run sweep.* axes, emit CSV")
    sweep.add_argument("--jobs", type=int, default=1, help="sweep cells run in parallel")
    sub.add_parser("validate", parents=[common], help="check all algorithms against the oracle")
    return parser


def _write_rows(result: ExperimentResultModel, out: Path | None) -> None:
    if out is None:
        write_csv(result.rows, sys.stdout)
        return
    with out.open("w", newline="") as fh:
        write_csv(result.rows, fh)
    logger.info("Wrote %d rows to %s", len(result.rows), out)


def cmd_generate(cfg: ExperimentConfig, out: Path | None) -> int:
    if out is None:
        raise ConfigError("generate needs --out PATH")
    g = cfg.graph
    edges = generate_kronecker(g.scale, g.edgefactor, g.max_weight, cfg.rt.seed)
    save_edge_list(edges, out)
    logger.info("Wrote %d edges over %d vertices to %s", len(edges), edges.n, out)
    return EXIT_OK


def cmd_run(cfg: ExperimentConfig, out: Path | None) -> int:
    result = experiment.run(cfg)
    _write_rows(result, out)
    return EXIT_OK if result.passed else EXIT_VALIDATION_FAILED


def cmd_sweep(cfg: ExperimentConfig, out: Path | None, jobs: int) -> int:
    result = experiment.sweep(cfg, jobs=jobs)
    _write_rows(result, out)
    return EXIT_OK if result.passed else EXIT_VALIDATION_FAILED


def cmd_validate(cfg: ExperimentConfig, out: Path | None) -> int:
    summary = experiment.validate_all(cfg)
    stream: IO[str] = out.open("w") if out else sys.stdout
    try:
        for check in summary.checks:
            status = "PASS" if check.passed else "FAIL"
            line = (
                f"{status} {check.algorithm} source={check.source} "
                f"ranks={check.num_ranks} mismatches={check.mismatches}"
            )
            if check.conservation_errors:
                line += " conservation=" + "; ".join(check.conservation_errors)
            print(line, file=stream)
        print(
            f"{'PASSED' if summary.passed else 'FAILED'}: "
            f"{sum(c.passed for c in summary.checks)}/{len(summary.checks)} checks",
            file=stream,
        )
    finally:
        if out:
            stream.close()
    return EXIT_OK if summary.passed else EXIT_VALIDATION_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        cfg = parse_config(args.config, parse_flags(extra))
        if args.command == "generate":
            return cmd_generate(cfg, args.out)
        if args.command == "run":
            return cmd_run(cfg, args.out)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.out, args.jobs)
        return cmd_validate(cfg, args.out)
    except (ConfigError, EdgeListError) as e:
        print(f"dgalab: error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except LivelockError as e:
        print(f"dgalab: error: {e}; diagnostics: {e.diagnostics}", file=sys.stderr)
        return EXIT_VALIDATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
