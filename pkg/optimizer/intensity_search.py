#!/usr/bin/env python3
"""
Intensity Search
Finds the pulse intensity mu that maximizes the secrecy capacity S.

The search runs in two stages:
1. A coarse log-spaced grid over [mu_lo, mu_hi]
2. Golden-section refinement of every grid bracket whose local maximum is
   within GRID_TIE_TOL of the best one

Unimodality is not assumed: comparable local maxima are all refined and the
best refined point wins.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np

from link_budget.budget_engine import BudgetLedger, compose_ledger
from link_budget.errors import DomainError
from link_budget.parameters import LinkParameters, SecurityParameters

# Global search settings
DEFAULT_MU_BOUNDS = (1e-4, 10.0)
MIN_GRID_POINTS = 64
DEFAULT_GRID_POINTS = 96
GRID_TIE_TOL = 1e-6
# Golden-section brackets are shrunk to this width relative to mu; below it
# the change of S is lost in rounding near a smooth maximum.
MU_REL_TOL = 1e-8

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OptimizationResult:
    """
    Outcome of a scalar search over mu, alpha or m.

    argmax is the optimal (or threshold) value of the searched parameter and
    value is S evaluated there. witness holds the bracket (S <= 0, S > 0)
    that certifies a threshold search.
    """
    target: str
    argmax: float
    value: float
    feasible: bool
    iterations: int
    ledger_at_optimum: Optional[BudgetLedger]
    boundary: bool = False
    witness: Optional[Tuple[float, float]] = None

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "argmax": self.argmax,
            "value": self.value,
            "feasible": self.feasible,
            "iterations": self.iterations,
            "boundary": self.boundary,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def ledger_or_none(link: LinkParameters, sec: SecurityParameters) -> Optional[BudgetLedger]:
    """
    Compute a ledger quietly for use inside a search loop.

    Returns:
        BudgetLedger or None when the point lies outside the formula domain
        (for example n < 2 makes the authentication cost undefined)
    """
    try:
        return compose_ledger(link, sec)
    except DomainError:
        return None


def capacity_or_floor(link: LinkParameters, sec: SecurityParameters) -> float:
    """S at one point, with -inf standing in for points outside the formula domain."""
    ledger = ledger_or_none(link, sec)
    return -math.inf if ledger is None else ledger.capacity


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       rel_tol: float = MU_REL_TOL, max_iter: int = 200) -> Tuple[float, float, int]:
    """
    Maximize f on [lo, hi] by golden-section search.

    Args:
        f: Objective, assumed unimodal on the bracket
        lo, hi: Bracket ends
        rel_tol: Stop once hi - lo <= rel_tol * midpoint
        max_iter: Safety cap on the number of shrink steps

    Returns:
        tuple: (x, f(x), evaluations)
    """
    c = hi - _INV_PHI * (hi - lo)
    d = lo + _INV_PHI * (hi - lo)
    fc, fd = f(c), f(d)
    evaluations = 2

    for _ in range(max_iter):
        if hi - lo <= rel_tol * 0.5 * (lo + hi):
            break
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - _INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + _INV_PHI * (hi - lo)
            fd = f(d)
        evaluations += 1

    if fc >= fd:
        return c, fc, evaluations
    return d, fd, evaluations


def _candidate_brackets(values: np.ndarray) -> list:
    best = values.max()
    tie_floor = best - GRID_TIE_TOL * abs(best)
    last = len(values) - 1
    indices = []
    for i, value in enumerate(values):
        if value < tie_floor:
            continue
        left = values[i - 1] if i > 0 else -math.inf
        right = values[i + 1] if i < last else -math.inf
        if value >= left and value >= right:
            indices.append(i)
    return indices


def optimize_mu(link: LinkParameters, sec: SecurityParameters,
                mu_bounds: Tuple[float, float] = DEFAULT_MU_BOUNDS,
                grid_points: int = DEFAULT_GRID_POINTS) -> OptimizationResult:
    """
    Find the mean photon number that maximizes S.

    Args:
        link: Link parameters; its source.mu is ignored
        sec: Security parameters
        mu_bounds: Search interval (mu_lo, mu_hi) with 0 < mu_lo < mu_hi
        grid_points: Coarse grid size (>= MIN_GRID_POINTS)

    Returns:
        OptimizationResult: feasible=False with the least-negative grid point
        when S <= 0 on the whole grid
    """
    mu_lo, mu_hi = mu_bounds
    if not 0 < mu_lo < mu_hi:
        raise DomainError(f"mu bounds must satisfy 0 < mu_lo < mu_hi (got {mu_bounds})")
    if grid_points < MIN_GRID_POINTS:
        raise DomainError(f"optimizer.grid_points must be >= {MIN_GRID_POINTS} (got {grid_points})")

    def objective(mu: float) -> float:
        return capacity_or_floor(link.with_mu(mu), sec)

    grid = np.geomspace(mu_lo, mu_hi, grid_points)
    grid[0], grid[-1] = mu_lo, mu_hi
    values = np.array([objective(float(mu)) for mu in grid])
    evaluations = grid_points

    best_index = int(np.argmax(values))
    best_mu, best_value = float(grid[best_index]), float(values[best_index])

    if best_value > 0:
        for i in _candidate_brackets(values):
            lo = float(grid[max(i - 1, 0)])
            hi = float(grid[min(i + 1, grid_points - 1)])
            mu, value, used = golden_section_max(objective, lo, hi)
            evaluations += used
            if value > best_value:
                best_mu, best_value = mu, value

    ledger = ledger_or_none(link.with_mu(best_mu), sec)
    value = ledger.capacity if ledger is not None else -math.inf
    return OptimizationResult(
        target="mu",
        argmax=best_mu,
        value=value,
        feasible=value > 0,
        iterations=evaluations,
        ledger_at_optimum=ledger,
        boundary=best_mu in (mu_lo, mu_hi),
    )


__all__ = [
    "OptimizationResult", "optimize_mu", "golden_section_max",
    "ledger_or_none", "capacity_or_floor",
    "DEFAULT_MU_BOUNDS", "DEFAULT_GRID_POINTS", "MIN_GRID_POINTS",
]
