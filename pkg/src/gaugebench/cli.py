"""Command-line interface.

Subcommands mirror the task names; every one accepts --config plus the
override flags.  Exit codes: 0 success, 1 check failure, 2 config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .algebroid import NotRepresentable
from .driver import ConfigError, RunConfig, run_task
from .gravity import DegenerateMetric, DegenerateTetrad
from .optimize import OptimizationFailure

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3

TASKS = (
    "verify",
    "matrix-model",
    "lattice",
    "algebroid",
    "spectral",
    "gravity",
    "minimize",
)


def parse_grid(text: str):
    for sep in ("x", ","):
        if sep in text:
            return tuple(int(p) for p in text.split(sep) if p)
    return (int(text),) * 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaugebench",
        description="Numerical workbench for gauge-field constructions",
    )
    sub = parser.add_subparsers(dest="task", required=True)
    for task in TASKS:
        p = sub.add_parser(task, help=f"run the {task} task")
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--n", type=int, help="matrix size")
        p.add_argument("--grid", type=parse_grid, help="lattice extents, e.g. 8x8")
        p.add_argument("--mu", type=float, help="mass parameter")
        p.add_argument("--seed", type=int, help="random seed")
        p.add_argument("--tol", type=float, help="uniform tolerance override")
        p.add_argument("--out", help="result JSON path")
        p.add_argument(
            "--gradient", choices=("analytic", "fd"), help="gradient mode for minimize"
        )
        p.add_argument("--report-dir", help="directory for figures and CSV output")
        p.add_argument(
            "--record-timing",
            action="store_true",
            help="include wall time in the result (breaks byte determinism)",
        )
        if task == "minimize":
            p.add_argument(
                "--kind",
                choices=("matrix-model", "lattice-ymh", "algebroid"),
                default=None,
                help="action functional to minimize",
            )
    return parser


def config_from_args(args) -> RunConfig:
    data = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON (line {exc.lineno}): {exc.msg}")
    overrides = {
        "task": args.task,
        "n": args.n,
        "grid": args.grid,
        "mu": args.mu,
        "seed": args.seed,
        "out": args.out,
        "report_dir": args.report_dir,
    }
    if args.record_timing:
        overrides["record_timing"] = True
    if getattr(args, "kind", None):
        overrides["kind"] = args.kind
    if args.gradient:
        overrides["optimizer"] = {"gradient": args.gradient}
    if args.tol is not None:
        data.setdefault("tol", {})
        data["tol"]["default"] = args.tol
    cfg = RunConfig.from_dict(data, **overrides)
    if args.tol is not None:
        # a bare --tol value overrides every named tolerance
        class _Uniform(dict):
            def get(self, key, default=None):
                return args.tol

        cfg.tol = _Uniform()
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    try:
        result = run_task(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except (OptimizationFailure, DegenerateMetric, DegenerateTetrad, NotRepresentable) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except np.linalg.LinAlgError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    payload = result.to_json_str()
    if config.out:
        result.write(config.out)
    else:
        sys.stdout.write(payload)
    if config.report_dir:
        from .report import render_report

        render_report(result, config.report_dir)
    for c in result.checks:
        status = c["status"].upper()
        print(f"[{status:>7}] {c['name']}  residual={c['residual']:.3e}", file=sys.stderr)
    return EXIT_OK if result.passed else EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
