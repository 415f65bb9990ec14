#!/usr/bin/env python3
"""
Validation Suite
Checks the budget engine against the independent oracles.

Checks:
1. Special functions: erf round trip and the Renyi-information endpoints
2. Leakage closed forms against the per-photon series on a (mu, y) grid
3. Regime-boundary continuity of the adaptive series
4. Partial leakage: Eve never learns every multi-photon bit
5. Adaptive dominance over both fixed strategies
6. Monte Carlo agreement of n, e_T, n1 and e_T1 with the analytic counts
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
from tqdm import tqdm

from link_budget.budget_engine import error_count, nu_per_pulse_pair, sifted_length, single_photon_counts
from link_budget.parameters import AttackRegime, LinkParameters, RegimeLabel, Y_HIGH, Y_LOW
from link_budget.photon_stats import inverse_erf, poisson_tail, renyi_info_max
from mc_oracle.leakage_series import nu_series
from mc_oracle.pulse_simulator import simulate_block

# Grids and tolerances
ORACLE_MU_GRID = (0.05, 0.1, 0.5, 1.0, 2.0, 5.0)
ORACLE_Y_GRID = (0.05, 0.1, 0.206, 0.25, 0.293, 0.5, 0.9)
CONTINUITY_MU_GRID = (0.1, 0.5, 1.0, 2.0)
ORACLE_TOL = 1e-10
ERF_TOL = 1e-10
MC_SIGMAS = 4.0
MC_PASS_FRACTION = 0.95

SPOT_VALUES = (
    (1.0, 0.5, RegimeLabel.INDIRECT, 0.1548181217),
    (1.0, 0.1, RegimeLabel.DIRECT, 0.0594701081),
    (1.0, 0.25, RegimeLabel.ADAPTIVE, 0.0882650770),
)
SPOT_TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"check": self.name, "passed": self.passed, "detail": self.detail}


def _regime_for(y: float) -> AttackRegime:
    if y > Y_HIGH:
        return AttackRegime(RegimeLabel.INDIRECT, y)
    if y < Y_LOW:
        return AttackRegime(RegimeLabel.DIRECT, y)
    return AttackRegime(RegimeLabel.ADAPTIVE, y)


def check_special_functions() -> List[CheckResult]:
    grid = np.linspace(-0.999, 0.999, 1000)
    worst = max(abs(math.erf(inverse_erf(float(z))) - z) for z in grid)
    endpoints = (renyi_info_max(0.0), renyi_info_max(1.0 / 3.0))
    return [
        CheckResult("erf round trip", worst <= ERF_TOL, f"max |erf(erfinv(z)) - z| = {worst:.3e}"),
        CheckResult("renyi endpoints", abs(endpoints[0]) <= 1e-14 and abs(endpoints[1] - 1.0) <= 1e-14,
                    f"I(0) = {endpoints[0]!r}, I(1/3) = {endpoints[1]!r}"),
    ]


def check_oracle_equivalence() -> List[CheckResult]:
    """One check per y value, covering every mu of the grid, compared relative to the series value."""
    results = []
    for y in ORACLE_Y_GRID:
        regime = _regime_for(y)
        worst = 0.0
        for mu in ORACLE_MU_GRID:
            series = nu_series(mu, y, regime.label)
            worst = max(worst, abs(series - nu_per_pulse_pair(mu, regime)) / series)
        results.append(CheckResult(f"nu closed form vs series (y={y}, {regime.label.value})",
                                   worst <= ORACLE_TOL, f"max relative deviation {worst:.3e}"))
    for mu, y, label, expected in SPOT_VALUES:
        value = nu_series(mu, y, label)
        results.append(CheckResult(f"nu spot value (mu={mu}, y={y}, {label.value})",
                                   abs(value - expected) <= SPOT_TOL, f"{value:.10f} vs {expected}"))
    return results


def check_regime_continuity() -> List[CheckResult]:
    high = max(abs(nu_series(mu, Y_HIGH, RegimeLabel.ADAPTIVE)
                   - nu_per_pulse_pair(mu, AttackRegime(RegimeLabel.INDIRECT, Y_HIGH)))
               for mu in CONTINUITY_MU_GRID)
    low = max(abs(nu_series(mu, Y_LOW, RegimeLabel.ADAPTIVE)
                  - nu_per_pulse_pair(mu, AttackRegime(RegimeLabel.DIRECT, Y_LOW)))
              for mu in CONTINUITY_MU_GRID)
    return [
        CheckResult(f"adaptive = indirect at y_high = {Y_HIGH:.5f}", high <= ORACLE_TOL, f"max deviation {high:.3e}"),
        CheckResult(f"adaptive = direct at y_low = {Y_LOW:.5f}", low <= ORACLE_TOL, f"max deviation {low:.3e}"),
    ]


def check_partial_leakage() -> List[CheckResult]:
    worst_ratio = 0.0
    for mu in ORACLE_MU_GRID:
        for y in ORACLE_Y_GRID:
            worst_ratio = max(worst_ratio, nu_per_pulse_pair(mu, _regime_for(y)) / poisson_tail(mu, 2))
    return [CheckResult("partial multi-photon leakage", worst_ratio < 1.0,
                        f"largest conceded fraction {worst_ratio:.6f}")]


def check_adaptive_dominance() -> List[CheckResult]:
    violations = 0
    for mu in ORACLE_MU_GRID:
        for y in ORACLE_Y_GRID:
            adaptive = nu_series(mu, y, RegimeLabel.ADAPTIVE)
            fixed = max(nu_series(mu, y, RegimeLabel.DIRECT), nu_series(mu, y, RegimeLabel.INDIRECT))
            if adaptive < fixed:
                violations += 1
    return [CheckResult("adaptive dominates fixed strategies", violations == 0,
                        f"{violations} violations on {len(ORACLE_MU_GRID) * len(ORACLE_Y_GRID)} points")]


def expected_counts(m: float, link: LinkParameters) -> Dict[str, float]:
    """Analytic sifted, error and single-photon counts for m pulses."""
    source, channel, detector = link.source, link.channel, link.detector
    n1, e_t1 = single_photon_counts(m, source, channel, detector)
    return {
        "sifted": sifted_length(m, source, channel, detector),
        "errors": error_count(m, source, channel, detector),
        "sifted_single_photon": n1,
        "errors_single_photon": e_t1,
    }


def monte_carlo_deviations(m: int, link: LinkParameters, seed: int, workers: int = 1) -> Dict[str, float]:
    """
    Deviation of each simulated count from its expectation, in standard deviations.

    Each count is a sum of m independent indicators, so sigma = sqrt(m p (1 - p))
    with p the expected count divided by m.
    """
    outcome = simulate_block(m, link, seed, workers)
    deviations = {}
    for name, expected in expected_counts(m, link).items():
        p = expected / m
        sigma = math.sqrt(m * p * (1.0 - p))
        observed = getattr(outcome, name)
        if sigma == 0.0:
            deviations[name] = 0.0 if observed == expected else math.inf
        else:
            deviations[name] = abs(observed - expected) / sigma
    return deviations


def check_monte_carlo(link: LinkParameters, m: int, seeds: int, base_seed: int,
                      workers: int = 1, progress: bool = True) -> List[CheckResult]:
    """Pass when at least MC_PASS_FRACTION of the seeds keep every count within MC_SIGMAS."""
    if seeds <= 0:
        return []
    passing = 0
    worst = 0.0
    for offset in tqdm(range(seeds), desc="Monte Carlo seeds", unit="seeds", disable=not progress):
        deviations = monte_carlo_deviations(m, link, (base_seed + offset) % 2 ** 64, workers)
        worst = max(worst, max(deviations.values()))
        if all(d <= MC_SIGMAS for d in deviations.values()):
            passing += 1
    fraction = passing / seeds
    return [CheckResult(f"Monte Carlo agreement (m={m}, {seeds} seeds)", fraction >= MC_PASS_FRACTION,
                        f"{passing}/{seeds} seeds within {MC_SIGMAS:g} sigma, worst {worst:.2f} sigma")]


def run_validation(link: LinkParameters, m: int, seeds: int, base_seed: int,
                   workers: int = 1, progress: bool = True) -> List[CheckResult]:
    """
    Run every oracle check.

    Args:
        link: Link used for the Monte Carlo comparison
        m: Pulses per Monte Carlo block
        seeds: Number of independent Monte Carlo seeds (0 skips the simulation)
        base_seed: Seed of the first block; later blocks use consecutive seeds
        workers: Threads for Monte Carlo shards
        progress: Show tqdm progress bars

    Returns:
        list: CheckResult per check, in a fixed order
    """
    results = []
    results += check_special_functions()
    results += check_oracle_equivalence()
    results += check_regime_continuity()
    results += check_partial_leakage()
    results += check_adaptive_dominance()
    results += check_monte_carlo(link, m, seeds, base_seed, workers, progress)
    return results


__all__ = [
    "CheckResult", "run_validation", "expected_counts", "monte_carlo_deviations",
    "check_special_functions", "check_oracle_equivalence", "check_regime_continuity",
    "check_partial_leakage", "check_adaptive_dominance", "check_monte_carlo",
]
