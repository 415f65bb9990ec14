#!/usr/bin/env python3
"""
Feasibility Thresholds
Root-finding searches for the edge of the region where S > 0:
1. max_attenuation - smallest channel transmission alpha with S > 0
2. min_block_length - smallest block length m with S > 0

Both return an OptimizationResult whose witness is the final bracket
(last point with S <= 0, first point with S > 0).
"""

from __future__ import annotations

import math
from enum import Enum
from typing import Callable, Tuple

import numpy as np

from link_budget.budget_engine import asymptotic_capacity
from link_budget.errors import DomainError
from link_budget.parameters import LinkParameters, SecurityParameters
from optimizer.intensity_search import (
    DEFAULT_GRID_POINTS,
    DEFAULT_MU_BOUNDS,
    OptimizationResult,
    capacity_or_floor,
    ledger_or_none,
    optimize_mu,
)

# Global search settings
ALPHA_FLOOR = 1e-12
ALPHA_ABS_TOL = 1e-9
ALPHA_SCAN_POINTS = 256
# Doubling stops here; beyond it S is taken to be non-positive
M_CEILING = 2 ** 80


class MuPolicy(str, Enum):
    FIXED = "fixed"
    OPTIMIZED = "optimized"


def bisect_threshold(positive: Callable[[float], bool], lo: float, hi: float,
                     tol: float) -> Tuple[float, float, int]:
    """
    Shrink a bracket with positive(lo) False and positive(hi) True.

    Returns:
        tuple: (lo, hi, evaluations) with hi - lo <= tol
    """
    evaluations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if positive(mid):
            hi = mid
        else:
            lo = mid
        evaluations += 1
    return lo, hi, evaluations


def max_attenuation(link: LinkParameters, sec: SecurityParameters,
                    mu_policy: MuPolicy = MuPolicy.FIXED,
                    mu_bounds: Tuple[float, float] = DEFAULT_MU_BOUNDS,
                    grid_points: int = DEFAULT_GRID_POINTS) -> OptimizationResult:
    """
    Find the smallest channel transmission alpha that still gives S > 0.

    When y does not depend on alpha, S is monotone in alpha and a plain
    bisection on [ALPHA_FLOOR, 1] is used. When y = eta * alpha the regime can
    change along the way, so an ascending log grid locates the first sign
    change which is then bisected.

    Args:
        link: Link parameters; its channel.alpha is ignored
        sec: Security parameters
        mu_policy: Keep source.mu fixed or re-optimize it at every alpha
        mu_bounds, grid_points: Passed to optimize_mu under the optimized policy

    Returns:
        OptimizationResult: argmax is alpha*, infeasible if S(1) <= 0
    """
    mu_policy = MuPolicy(mu_policy)
    evaluations = 0

    def capacity(alpha: float) -> float:
        nonlocal evaluations
        evaluations += 1
        trial = link.with_alpha(alpha)
        if mu_policy is MuPolicy.OPTIMIZED:
            return optimize_mu(trial, sec, mu_bounds, grid_points).value
        return capacity_or_floor(trial, sec)

    def result(alpha: float, witness=None, boundary=False) -> OptimizationResult:
        trial = link.with_alpha(alpha)
        if mu_policy is MuPolicy.OPTIMIZED:
            best = optimize_mu(trial, sec, mu_bounds, grid_points)
            ledger, value = best.ledger_at_optimum, best.value
        else:
            ledger = ledger_or_none(trial, sec)
            value = ledger.capacity if ledger is not None else -math.inf
        return OptimizationResult(
            target="alpha", argmax=alpha, value=value, feasible=value > 0,
            iterations=evaluations, ledger_at_optimum=ledger,
            boundary=boundary, witness=witness,
        )

    if capacity(1.0) <= 0:
        return result(1.0, boundary=True)

    if not link.eve.y_depends_on_alpha:
        if capacity(ALPHA_FLOOR) > 0:
            return result(ALPHA_FLOOR, boundary=True)
        lo, hi, _ = bisect_threshold(lambda a: capacity(a) > 0, ALPHA_FLOOR, 1.0, ALPHA_ABS_TOL)
        return result(hi, witness=(lo, hi))

    grid = np.geomspace(ALPHA_FLOOR, 1.0, ALPHA_SCAN_POINTS)
    grid[0], grid[-1] = ALPHA_FLOOR, 1.0
    previous = None
    for alpha in grid:
        alpha = float(alpha)
        if capacity(alpha) > 0:
            if previous is None:
                return result(alpha, boundary=True)
            lo, hi, _ = bisect_threshold(lambda a: capacity(a) > 0, previous, alpha, ALPHA_ABS_TOL)
            return result(hi, witness=(lo, hi))
        previous = alpha
    return result(1.0, boundary=True)


def min_block_length(link: LinkParameters, sec: SecurityParameters) -> OptimizationResult:
    """
    Find the smallest block length m with S(m) > 0.

    S is non-decreasing in m: the authentication and privacy-amplification
    overheads amortize and xi shrinks as n1^{-1/2}. The asymptotic capacity is
    checked first; then m doubles from 2 until S > 0 and an integer bisection
    closes the bracket.

    Returns:
        OptimizationResult: argmax is m_min (an integer), infeasible with
        argmax = inf when S_inf <= 0
    """
    try:
        s_inf = asymptotic_capacity(link, sec)
    except DomainError:
        s_inf = -math.inf
    if s_inf <= 0:
        return OptimizationResult(
            target="m", argmax=math.inf, value=s_inf, feasible=False,
            iterations=1, ledger_at_optimum=None,
        )

    evaluations = 0

    def positive(m: int) -> bool:
        nonlocal evaluations
        evaluations += 1
        return capacity_or_floor(link, sec.with_m(m)) > 0

    lo, hi = 1, 2
    while not positive(hi):
        if hi >= M_CEILING:
            ledger = ledger_or_none(link, sec.with_m(hi))
            return OptimizationResult(
                target="m", argmax=math.inf, value=ledger.capacity if ledger else -math.inf,
                feasible=False, iterations=evaluations, ledger_at_optimum=ledger,
            )
        lo, hi = hi, hi * 2

    while hi - lo > 1:
        mid = (lo + hi) // 2
        if positive(mid):
            hi = mid
        else:
            lo = mid

    ledger = ledger_or_none(link, sec.with_m(hi))
    return OptimizationResult(
        target="m", argmax=float(hi), value=ledger.capacity, feasible=ledger.capacity > 0,
        iterations=evaluations, ledger_at_optimum=ledger,
        boundary=hi == 2, witness=(float(lo), float(hi)),
    )


__all__ = ["MuPolicy", "bisect_threshold", "max_attenuation", "min_block_length"]
