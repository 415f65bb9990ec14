#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Report Writer
Human-readable tables and machine-readable JSON lines for the CLI.

Human mode rounds for display; JSON mode prints every float with full
repr precision, one object per line, with null for NaN and infinities.
"""

import json
import math
import sys
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from link_budget.budget_engine import BudgetLedger
from link_budget.parameters import Y_HIGH, Y_LOW
from mc_oracle.validation_suite import CheckResult
from optimizer.intensity_search import OptimizationResult

# (label, ledger attribute) in ledger order
LEDGER_ROWS: List[Tuple[str, str]] = [
    ("Raw block length m", "m"),
    ("Sifted length n", "n"),
    ("Sifted errors e_T", "e_t"),
    ("Single-photon sifted n1", "n1"),
    ("Single-photon errors e_T1", "e_t1"),
    ("Error-correction leak q", "q"),
    ("  Shannon minimum q_min", "q_min"),
    ("Single-photon attack t", "t"),
    ("  Attack margin xi", "xi"),
    ("Multi-photon leak nu", "nu"),
    ("Authentication cost a", "a"),
    ("Privacy amplification g_pa", "g_pa"),
    ("Final key length L", "key_length"),
    ("Secrecy capacity S", "capacity"),
    ("  Small dark-count S", "capacity_approx"),
    ("Key rate R (bits/s)", "rate"),
    ("Multi-photon share conceded", "multiphoton_fraction"),
    ("Eve info after PA (bits)", "eve_info_after_pa"),
    ("Auth spoofing bound", "auth_spoof_bound"),
    ("Key mismatch bound", "key_mismatch_bound"),
]


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        if value != 0 and (abs(value) >= 1e6 or abs(value) < 1e-3):
            return f"{value:.6e}"
        return f"{value:.6f}"
    return str(value)


def print_table(headers: Sequence[str], rows: Sequence[Sequence[Any]], title: Optional[str] = None) -> None:
    """
    Print rows as a bordered text table.

    Args:
        headers: Column names
        rows: Row values, formatted with _format_value
        title: Optional heading printed above the table
    """
    cells = [[_format_value(v) for v in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in cells]) for i, h in enumerate(headers)]
    border = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    header_border = "+" + "+".join("=" * (w + 2) for w in widths) + "+"
    line = "| " + " | ".join("{:<{}}" for _ in widths) + " |"

    if title:
        print(f"\n{title}:")
    print(border)
    print(line.format(*[x for pair in zip(headers, widths) for x in pair]))
    print(header_border)
    for row in cells:
        print(line.format(*[x for pair in zip(row, widths) for x in pair]))
    print(border)


def print_ledger(ledger: BudgetLedger, title: str = "Key-length ledger") -> None:
    """Print every ledger term in bits, the capacity figures and the regime."""
    rows = [(label, getattr(ledger, attribute)) for label, attribute in LEDGER_ROWS]
    rows.append(("Attack regime", f"{ledger.regime.label.value} (y = {ledger.regime.y:.6g})"))
    rows.append(("Feasible (L > 0)", "yes" if ledger.feasible else "no"))
    print_table(["Term", "Value"], rows, title=title)
    for advisory in ledger.advisories:
        print(f"⚠ {advisory}")


def print_optimization(result: OptimizationResult) -> None:
    rows = [
        ("Target", result.target),
        ("Optimum", result.argmax),
        ("S at optimum", result.value),
        ("Feasible", "yes" if result.feasible else "no"),
        ("Evaluations", result.iterations),
        ("On search boundary", "yes" if result.boundary else "no"),
    ]
    if result.witness is not None:
        rows.append(("Witness (S <= 0, S > 0)", f"{result.witness[0]!r}, {result.witness[1]!r}"))
    print_table(["Field", "Value"], rows, title=f"Optimization over {result.target}")


def print_thresholds() -> None:
    print(f"Regime thresholds: y_high = {Y_HIGH:.5f} (indirect above), y_low = {Y_LOW:.5f} (direct below)")


def print_checks(checks: Iterable[CheckResult]) -> None:
    """Print one ✓/✗ line per check followed by a summary."""
    checks = list(checks)
    print("\nValidation Summary:")
    for check in checks:
        mark = "✓" if check.passed else "✗"
        print(f"  {mark} {check.name}: {check.detail}")
    failed = [c for c in checks if not c.passed]
    if failed:
        print(f"\n✗ {len(failed)} of {len(checks)} checks failed")
    else:
        print(f"\n✓ All {len(checks)} checks passed")


def print_sweep_summary(rows: int, path: str, best: Optional[Dict[str, Any]], axis: str) -> None:
    print(f"\n✓ Wrote {rows} rows to {path}")
    if best is None:
        print("⚠ No grid point produced a ledger")
        return
    print(f"  Best S = {_format_value(best['S'])} at {axis} = {best[axis]!r}")


def _strict_json(value: Any) -> Any:
    # Strict JSON has no NaN or Infinity; both become null
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _strict_json(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_strict_json(item) for item in value]
    return value


def emit_json(record: Dict[str, Any], stream=None) -> None:
    """Write one JSON object per line with full float precision and null for non-finite floats."""
    stream = stream or sys.stdout
    stream.write(json.dumps(_strict_json(record), allow_nan=False) + "\n")


def ledger_record(ledger: BudgetLedger) -> Dict[str, Any]:
    return {"kind": "ledger", **ledger.to_dict()}


def optimization_record(result: OptimizationResult) -> Dict[str, Any]:
    record = {"kind": "optimization", **result.to_dict()}
    if result.ledger_at_optimum is not None:
        record["ledger"] = result.ledger_at_optimum.to_dict()
    return record


def threshold_record() -> Dict[str, Any]:
    return {"kind": "thresholds", "y_high": Y_HIGH, "y_low": Y_LOW}
