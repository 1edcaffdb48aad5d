"""Command-line interface.

Subcommands: solve, sweep-alpha, bench-n, oracle-validate, gen-scenario.
Exit codes: 0 success, 2 configuration error, 3 solver non-convergence,
4 oracle-guard refusal.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace

from .config import RunConfig, parse_config
from .errors import ConfigError, OracleGuardError
from .harness import alternate_optimize, bench_runtime, oracle_validate, sweep_alpha
from .scenario import generate_random_scenario, save_scenario, scenario_to_dict

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NONCONVERGED = 3
EXIT_ORACLE_GUARD = 4


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the JSON run configuration")
    p.add_argument("--method", choices=("mm", "rmo", "mbnb"), help="override the configured engine")
    p.add_argument("--alpha", type=float, help="override the configured weight factor")
    p.add_argument("--seed", type=int, help="override the scenario seed")
    p.add_argument("--out", help="output path ('-' or omitted: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="override the output format")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irsdfrc",
        description="Joint radar precoder and IRS phase design by alternating optimization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("solve", "run one alternating optimization and emit the iteration report"),
        ("sweep-alpha", "sweep the radar/communication weight factor"),
        ("bench-n", "measure convergence time across IRS sizes"),
        ("oracle-validate", "compare engines against the exhaustive grid oracle"),
        ("gen-scenario", "generate a scenario and write it as JSON"),
    ):
        _add_common(sub.add_parser(name, help=help_text))
    return parser


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.method is not None:
        cfg = replace(cfg, method=args.method)
    if args.alpha is not None:
        cfg = replace(cfg, alpha=args.alpha)
    if args.seed is not None:
        cfg = replace(cfg, scenario=replace(cfg.scenario, rng_seed=args.seed))
    if args.out is not None or args.format is not None:
        out = replace(
            cfg.output,
            **{k: v for k, v in (("path", args.out), ("format", args.format)) if v is not None},
        )
        cfg = replace(cfg, output=out)
    return cfg


def _emit(rows: list, columns: list, cfg: RunConfig) -> None:
    path = cfg.output.path
    handle = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8", newline="")
    try:
        if cfg.output.format == "json":
            json.dump(rows, handle, indent=2)
            handle.write("\n")
        else:
            writer = csv.DictWriter(handle, fieldnames=columns)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: row[k] for k in columns})
    finally:
        if handle is not sys.stdout:
            handle.close()


def _emit_json_document(document: dict, cfg: RunConfig) -> None:
    path = cfg.output.path
    handle = sys.stdout if path in (None, "-") else open(path, "w", encoding="utf-8")
    try:
        json.dump(document, handle, indent=2)
        handle.write("\n")
    finally:
        if handle is not sys.stdout:
            handle.close()


def cmd_solve(cfg: RunConfig) -> int:
    report = alternate_optimize(cfg)
    if cfg.output.format == "json":
        _emit_json_document(report.to_json_dict(), cfg)
    else:
        _emit(report.rows(), ["iteration", "objective", "gamma_r_db_gain", "gamma_u_db_gain", "wall_ns"], cfg)
    if not report.converged:
        print("solver did not converge within the outer iteration limit", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_sweep_alpha(cfg: RunConfig) -> int:
    rows = sweep_alpha(cfg)
    _emit(
        rows,
        ["alpha", "trials", "radar_gain_db_mean", "radar_gain_db_var", "comm_gain_db_mean", "comm_gain_db_var"],
        cfg,
    )
    return EXIT_OK


def cmd_bench_n(cfg: RunConfig) -> int:
    rows = bench_runtime(cfg)
    _emit(rows, ["n", "method", "trials", "wall_s_mean", "wall_s_std", "outer_iters_mean", "converged"], cfg)
    return EXIT_OK


def cmd_oracle_validate(cfg: RunConfig) -> int:
    rows = oracle_validate(cfg)
    _emit(rows, ["seed", "method", "objective", "oracle_objective", "ratio"], cfg)
    return EXIT_OK


def cmd_gen_scenario(cfg: RunConfig) -> int:
    s = generate_random_scenario(cfg.scenario)
    if cfg.output.path in (None, "-"):
        json.dump(scenario_to_dict(s), sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        save_scenario(s, cfg.output.path)
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "sweep-alpha": cmd_sweep_alpha,
    "bench-n": cmd_bench_n,
    "oracle-validate": cmd_oracle_validate,
    "gen-scenario": cmd_gen_scenario,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(parse_config(args.config), args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OracleGuardError as e:
        print(f"oracle guard: {e}", file=sys.stderr)
        return EXIT_ORACLE_GUARD


if __name__ == "__main__":
    sys.exit(main())
