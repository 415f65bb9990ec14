#!/usr/bin/env python3
"""
Leakage Series
Per-photon-number summation of Eve's multi-photon information.

Sums psi_j(mu) * i_j over the photon number j, where i_j is the information a
single pulse of j photons yields to the chosen attack. The result is an
independent check of the closed forms in link_budget.budget_engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Union

from link_budget.errors import DomainError
from link_budget.parameters import AttackRegime, RegimeLabel
from link_budget.photon_stats import poisson_pmf, poisson_tail

DEFAULT_SERIES_TOL = 1e-16
MAX_PHOTON_NUMBER = 2000


class Strategy(str, Enum):
    INDIRECT = "indirect"
    DIRECT = "direct"


@dataclass(frozen=True)
class PerPulseInfo:
    j: int
    strategy: Strategy
    bits: float


@dataclass(frozen=True)
class SeriesTerm:
    """One summand of the leakage series."""
    j: int
    psi_j: float
    strategy: Strategy
    bits: float

    @property
    def contribution(self) -> float:
        return self.psi_j * self.bits


def per_pulse_info(j: int, y: float, strategy: Strategy) -> PerPulseInfo:
    """
    Information Eve extracts from one pulse of j >= 2 photons.

    Indirect: 1 - (1-y)^{j-1}. Direct: y for j = 2, 1 - 2^{1 - ceil(j/2)} for j >= 3.
    """
    if j < 2:
        raise DomainError(f"per_pulse_info needs j >= 2 (got {j})")
    if not 0 < y <= 1:
        raise DomainError(f"per_pulse_info needs 0 < y <= 1 (got {y})")
    strategy = Strategy(strategy)
    if strategy is Strategy.INDIRECT:
        bits = 1.0 - (1.0 - y) ** (j - 1)
    elif j == 2:
        bits = y
    else:
        bits = 1.0 - 2.0 ** (1 - (j + 1) // 2)
    return PerPulseInfo(j=j, strategy=strategy, bits=bits)


def _best_for_regime(j: int, y: float, label: RegimeLabel) -> PerPulseInfo:
    if label is RegimeLabel.INDIRECT:
        return per_pulse_info(j, y, Strategy.INDIRECT)
    if label is RegimeLabel.DIRECT:
        return per_pulse_info(j, y, Strategy.DIRECT)
    indirect = per_pulse_info(j, y, Strategy.INDIRECT)
    direct = per_pulse_info(j, y, Strategy.DIRECT)
    return indirect if indirect.bits >= direct.bits else direct


def _label(regime: Union[AttackRegime, RegimeLabel, str]) -> RegimeLabel:
    if isinstance(regime, AttackRegime):
        return regime.label
    return RegimeLabel(regime)


def nu_series_terms(mu: float, y: float, regime: Union[AttackRegime, RegimeLabel, str],
                    tol: float = DEFAULT_SERIES_TOL) -> List[SeriesTerm]:
    """
    Per-photon-number breakdown of the leakage series.

    Terms are produced for j = 2, 3, ... while psi_{>=j}(mu) >= tol.
    The adaptive regime takes the larger of the two strategies for every j.

    Args:
        mu: Mean photon number (> 0)
        y: Eve's effective detection parameter in (0, 1]
        regime: indirect, direct or adaptive
        tol: Truncation threshold on the remaining Poisson mass (> 0)

    Returns:
        list: SeriesTerm per photon number
    """
    if mu <= 0:
        raise DomainError(f"nu_series needs mu > 0 (got {mu})")
    if tol <= 0:
        raise DomainError(f"nu_series needs tol > 0 (got {tol})")
    label = _label(regime)

    terms = []
    j = 2
    while j <= MAX_PHOTON_NUMBER and poisson_tail(mu, j) >= tol:
        info = _best_for_regime(j, y, label)
        terms.append(SeriesTerm(j=j, psi_j=poisson_pmf(mu, j), strategy=info.strategy, bits=info.bits))
        j += 1
    return terms


def nu_series(mu: float, y: float, regime: Union[AttackRegime, RegimeLabel, str],
              tol: float = DEFAULT_SERIES_TOL) -> float:
    """Multi-photon leakage per sifting pair, nu^max / (m/2), by direct summation."""
    return sum(term.contribution for term in nu_series_terms(mu, y, regime, tol))


__all__ = [
    "Strategy", "PerPulseInfo", "SeriesTerm",
    "per_pulse_info", "nu_series_terms", "nu_series",
]
