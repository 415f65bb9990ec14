#!/usr/bin/env python3
"""
QKD Budget Command Line
Subcommands over a scenario file:
1. budget   - print the key-length ledger
2. optimize - best mu, largest tolerable loss or smallest block length
3. sweep    - ledger table over one parameter, written as CSV
4. validate - oracle and Monte Carlo checks of the budget engine

Exit codes: 0 success, 1 validation check failed, 2 config error,
3 infeasible result, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add project root to Python path to enable absolute imports
# This allows the script to be run directly from any location
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from cli import report_writer
from link_budget.budget_engine import compose_ledger
from link_budget.errors import DomainError, InfeasibleError, ResourceError
from mc_oracle.validation_suite import run_validation
from optimizer.feasibility import max_attenuation, min_block_length
from optimizer.intensity_search import optimize_mu
from optimizer.sweep_runner import sweep
from scenario_config.config_loader import ConfigError, load_scenario, parse_overrides, resolve_worker_count

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4

DEFAULT_SEEDS = 20
TARGETS = ("mu", "alpha", "m")


def _config_failure(error: Exception) -> int:
    print(f"✗ Config error: {error}", file=sys.stderr)
    return EXIT_CONFIG


def _undefined_ledger(error: Exception) -> int:
    print(f"✗ Infeasible: {error}", file=sys.stderr)
    return EXIT_INFEASIBLE


def cmd_budget(config_path: str, overrides: Optional[Dict[str, Any]] = None, json_mode: bool = False) -> int:
    """
    Print the full ledger of a scenario.

    Returns:
        int: 0 if S > 0, 3 if S <= 0 (ledger still printed), 2 on config error
    """
    try:
        scenario = load_scenario(config_path, overrides)
    except (ConfigError, DomainError) as e:
        return _config_failure(e)

    try:
        ledger = compose_ledger(scenario.link, scenario.security)
    except (DomainError, InfeasibleError) as e:
        return _undefined_ledger(e)

    if json_mode:
        report_writer.emit_json(report_writer.ledger_record(ledger))
    else:
        report_writer.print_ledger(ledger, title=f"Key-length ledger for {config_path}")
        print(f"\n{'✓ Feasible' if ledger.feasible else '✗ Infeasible'}: S = {ledger.capacity!r}")
    return EXIT_OK if ledger.feasible else EXIT_INFEASIBLE


def cmd_optimize(config_path: str, target: str, overrides: Optional[Dict[str, Any]] = None,
                 json_mode: bool = False) -> int:
    """
    Optimize mu, or find the largest tolerable loss (smallest alpha) or the smallest block length.

    Returns:
        int: 0 if the result is feasible, 3 if not, 2 on config error
    """
    if target not in TARGETS:
        return _config_failure(f"--target must be one of {', '.join(TARGETS)} (got {target!r})")
    try:
        scenario = load_scenario(config_path, overrides)
    except (ConfigError, DomainError) as e:
        return _config_failure(e)

    settings = scenario.optimizer
    try:
        if target == "mu":
            result = optimize_mu(scenario.link, scenario.security, settings.mu_bounds, settings.grid_points)
        elif target == "alpha":
            result = max_attenuation(scenario.link, scenario.security, settings.alpha_policy,
                                     settings.mu_bounds, settings.grid_points)
        else:
            result = min_block_length(scenario.link, scenario.security)
    except (DomainError, InfeasibleError) as e:
        return _undefined_ledger(e)

    if json_mode:
        report_writer.emit_json(report_writer.optimization_record(result))
    else:
        report_writer.print_optimization(result)
        if result.ledger_at_optimum is not None:
            report_writer.print_ledger(result.ledger_at_optimum, title="Ledger at optimum")
        if result.boundary:
            print(f"⚠ Optimum lies on the search boundary ({target} = {result.argmax!r})")
        print(f"\n{'✓ Feasible' if result.feasible else '✗ Infeasible'}: S = {result.value!r}")
    return EXIT_OK if result.feasible else EXIT_INFEASIBLE


def cmd_sweep(config_path: str, output_path: str, overrides: Optional[Dict[str, Any]] = None,
              json_mode: bool = False) -> int:
    """
    Evaluate the sweep section of a scenario and write it as CSV.

    Returns:
        int: 0 once the table is written, 2 on config error, 4 if the file cannot be written
    """
    try:
        scenario = load_scenario(config_path, overrides)
        if scenario.sweep is None:
            raise ConfigError("scenario has no sweep section (set sweep.axis and a grid)", origin=str(config_path))
        workers = resolve_worker_count()
    except (ConfigError, DomainError) as e:
        return _config_failure(e)

    table = sweep(scenario.link, scenario.security, scenario.sweep, workers=workers, progress=not json_mode)
    try:
        written = table.to_csv(output_path)
    except OSError as e:
        print(f"✗ Cannot write {output_path}: {e}", file=sys.stderr)
        return EXIT_IO

    if json_mode:
        for record in table.records():
            report_writer.emit_json({"kind": "sweep_row", **record})
    else:
        report_writer.print_sweep_summary(len(table), str(written), table.best_row(), scenario.sweep.axis)
    return EXIT_OK


def cmd_validate(config_path: str, seeds: int = DEFAULT_SEEDS, overrides: Optional[Dict[str, Any]] = None,
                 json_mode: bool = False) -> int:
    """
    Run the oracle-equivalence grid and the Monte Carlo agreement checks.

    Returns:
        int: 0 only if every check passes, 1 otherwise, 2 on config error
    """
    try:
        scenario = load_scenario(config_path, overrides)
        workers = resolve_worker_count()
        if seeds < 0:
            raise ConfigError(f"--seeds must be >= 0 (got {seeds})", origin="<override>")
        checks = run_validation(scenario.link, scenario.validate.m, seeds, scenario.validate.seed,
                                workers=workers, progress=not json_mode)
    except (ConfigError, DomainError, ResourceError) as e:
        return _config_failure(e)

    if json_mode:
        report_writer.emit_json(report_writer.threshold_record())
        for check in checks:
            report_writer.emit_json({"kind": "check", **check.to_dict()})
    else:
        report_writer.print_thresholds()
        report_writer.print_checks(checks)
    return EXIT_OK if all(c.passed for c in checks) else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    # Subcommands accept --json too; SUPPRESS keeps them from resetting a flag given before the subcommand
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="Print one JSON object per line")

    parser = argparse.ArgumentParser(
        prog="qkdbudget",
        description="Secrecy capacity and key budget of weak-coherent-pulse BB84 links. "
                    "Any scenario key can be overridden with --key=value.",
        allow_abbrev=False,
    )
    parser.add_argument("--json", action="store_true", help="Print one JSON object per line")
    subparsers = parser.add_subparsers(dest="command", required=True)

    budget = subparsers.add_parser("budget", parents=[common], allow_abbrev=False, help="Print the key-length ledger")
    budget.add_argument("config", help="Scenario JSON file")

    optimize = subparsers.add_parser("optimize", parents=[common], allow_abbrev=False, help="Optimize mu, alpha or m")
    optimize.add_argument("config", help="Scenario JSON file")
    optimize.add_argument("--target", choices=TARGETS, default="mu", help="Quantity to search (default: mu)")

    sweep_parser = subparsers.add_parser("sweep", parents=[common], allow_abbrev=False, help="Write a ledger table over one parameter")
    sweep_parser.add_argument("config", help="Scenario JSON file with a sweep section")
    sweep_parser.add_argument("--out", required=True, help="Output CSV path")

    validate = subparsers.add_parser("validate", parents=[common], allow_abbrev=False, help="Run oracle and Monte Carlo checks")
    validate.add_argument("config", help="Scenario JSON file")
    validate.add_argument("--seeds", type=int, default=DEFAULT_SEEDS, help="Monte Carlo seeds (default: 20)")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse the command line and dispatch to a subcommand.

    Returns:
        int: Process exit code
    """
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        overrides = parse_overrides(extra)
    except ConfigError as e:
        return _config_failure(e)

    if args.command == "budget":
        return cmd_budget(args.config, overrides, args.json)
    if args.command == "optimize":
        return cmd_optimize(args.config, args.target, overrides, args.json)
    if args.command == "sweep":
        return cmd_sweep(args.config, args.out, overrides, args.json)
    return cmd_validate(args.config, args.seeds, overrides, args.json)


if __name__ == "__main__":
    sys.exit(main())
