#!/usr/bin/env python3
"""
Sweep Runner
Evaluates the ledger over a one-dimensional grid of a single parameter.

Points are independent and run on a thread pool; rows are assembled in grid
order. A point that fails domain validation becomes a row with an error
message instead of stopping the sweep.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from link_budget.errors import DomainError
from link_budget.parameters import LinkParameters, SecurityParameters
from optimizer.intensity_search import DEFAULT_GRID_POINTS, DEFAULT_MU_BOUNDS, ledger_or_none, optimize_mu

# Parameter paths that can be swept, mapped to (bundle, field)
SWEEP_AXES: Dict[str, Tuple[str, str]] = {
    "source.mu": ("source", "mu"),
    "source.tau": ("source", "tau"),
    "channel.alpha": ("channel", "alpha"),
    "channel.r_c": ("channel", "r_c"),
    "detector.eta": ("detector", "eta"),
    "detector.r_d": ("detector", "r_d"),
    "error_correction.x": ("error_correction", "x"),
    "eve.y_override": ("eve", "y_override"),
    "security.m": ("security", "m"),
    "security.epsilon": ("security", "epsilon"),
    "security.g_pa": ("security", "g_pa"),
    "security.g_auth": ("security", "g_auth"),
    "security.g_ec": ("security", "g_ec"),
    "security.g_tilde_ec": ("security", "g_tilde_ec"),
}

LEDGER_COLUMNS = ["n", "e_T", "q", "t", "nu", "a", "L", "S", "R", "regime", "feasible"]
OPTIMIZED_MU_COLUMN = "source.mu"
ERROR_COLUMN = "error"
# Columns whose empty cells are text, not missing numbers
TEXT_COLUMNS = ("regime", ERROR_COLUMN)


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter path, its ordered grid and whether mu is re-optimized per point."""
    axis: str
    grid: Tuple[float, ...]
    optimize_mu_per_point: bool = False
    mu_bounds: Tuple[float, float] = DEFAULT_MU_BOUNDS
    grid_points: int = DEFAULT_GRID_POINTS

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise DomainError(f"sweep.axis must be one of {sorted(SWEEP_AXES)} (got {self.axis!r})")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise DomainError("sweep.grid must be non-empty")
        steps = np.diff(grid)
        if len(steps) and not (np.all(steps > 0) or np.all(steps < 0)):
            raise DomainError("sweep.grid must be strictly monotone")
        if self.optimize_mu_per_point and self.axis == "source.mu":
            raise DomainError("sweep.optimize_mu cannot be combined with sweep.axis = source.mu")
        object.__setattr__(self, "grid", grid)


def apply_parameter(link: LinkParameters, sec: SecurityParameters,
                    axis: str, value: float) -> Tuple[LinkParameters, SecurityParameters]:
    """
    Return copies of (link, sec) with one parameter path replaced.

    Raises:
        DomainError: If the path is unknown or the new value breaks an invariant
    """
    if axis not in SWEEP_AXES:
        raise DomainError(f"unknown parameter path {axis!r}")
    bundle, name = SWEEP_AXES[axis]
    if bundle == "security":
        return link, replace(sec, **{name: value})
    updated = replace(getattr(link, bundle), **{name: value})
    return replace(link, **{bundle: updated}), sec


class SweepTable:
    """Sweep results in grid order, backed by a pandas DataFrame."""

    def __init__(self, frame: pd.DataFrame, axis: str):
        self.frame = frame
        self.axis = axis

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def columns(self) -> List[str]:
        return list(self.frame.columns)

    def records(self) -> List[dict]:
        return self.frame.to_dict(orient="records")

    def best_row(self) -> Optional[dict]:
        """Row with the largest S, or None if no row has a finite S."""
        capacity = pd.to_numeric(self.frame["S"], errors="coerce")
        if capacity.isna().all():
            return None
        return self.frame.loc[capacity.idxmax()].to_dict()

    def to_csv(self, path: str | Path) -> Path:
        """
        Write the table as comma-separated text with a header row and LF line endings.

        Floats are written in shortest round-trip form, so reading back with
        float_precision="round_trip" reproduces them exactly.
        """
        path = Path(path)
        self.frame.to_csv(path, index=False, sep=",", lineterminator="\n", encoding="utf-8")
        return path

    @classmethod
    def from_csv(cls, path: str | Path) -> "SweepTable":
        """Read a table written by to_csv; empty numeric cells come back as NaN."""
        header = pd.read_csv(path, nrows=0).columns
        numeric = {column: [""] for column in header if column not in TEXT_COLUMNS}
        frame = pd.read_csv(path, float_precision="round_trip", keep_default_na=False, na_values=numeric)
        return cls(frame, axis=frame.columns[0])


def _sweep_point(link: LinkParameters, sec: SecurityParameters, spec: SweepSpec, value: float) -> dict:
    row = {spec.axis: value}
    if spec.optimize_mu_per_point:
        row[OPTIMIZED_MU_COLUMN] = float("nan")
    empty = {column: float("nan") for column in LEDGER_COLUMNS}
    empty.update(regime="", feasible=False)

    try:
        point_link, point_sec = apply_parameter(link, sec, spec.axis, value)
        if spec.optimize_mu_per_point:
            result = optimize_mu(point_link, point_sec, spec.mu_bounds, spec.grid_points)
            row[OPTIMIZED_MU_COLUMN] = result.argmax
            ledger = result.ledger_at_optimum
        else:
            ledger = ledger_or_none(point_link, point_sec)
        if ledger is None:
            raise DomainError("ledger undefined at this point (sifted length too small for authentication)")
    except DomainError as e:
        row.update(empty)
        row[ERROR_COLUMN] = str(e)
        return row

    row.update(ledger.summary_row())
    row[ERROR_COLUMN] = ""
    return row


def sweep(link: LinkParameters, sec: SecurityParameters, spec: SweepSpec,
          workers: int = 1, progress: bool = True) -> SweepTable:
    """
    Compute one ledger per grid point, optionally with mu optimized at each point.

    Args:
        link: Base link parameters
        sec: Base security parameters
        spec: Axis, grid and per-point optimization flag
        workers: Thread count; results do not depend on it
        progress: Show a tqdm progress bar

    Returns:
        SweepTable: One row per grid point, in grid order
    """
    def run(value: float) -> dict:
        return _sweep_point(link, sec, spec, value)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        rows = list(tqdm(executor.map(run, spec.grid), total=len(spec.grid),
                         desc=f"Sweeping {spec.axis}", unit="points", disable=not progress))

    columns = [spec.axis]
    if spec.optimize_mu_per_point:
        columns.append(OPTIMIZED_MU_COLUMN)
    columns += LEDGER_COLUMNS + [ERROR_COLUMN]
    return SweepTable(pd.DataFrame(rows, columns=columns), axis=spec.axis)


__all__ = ["SWEEP_AXES", "SweepSpec", "SweepTable", "apply_parameter", "sweep"]
