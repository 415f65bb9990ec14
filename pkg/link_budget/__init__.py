"""
Link budget package.

This package provides the special-function kernel, the link/security
parameter bundles and the key-length ledger of a weak-coherent-pulse BB84 link.
"""

from link_budget.errors import BudgetError, DomainError, InfeasibleError, LinkAdvisory, ResourceError
from link_budget.parameters import (
    AttackRegime,
    ChannelModel,
    DetectorModel,
    ErrorCorrectionModel,
    EveCapability,
    EveClass,
    LinkParameters,
    Medium,
    RegimeLabel,
    SecurityParameters,
    SourceModel,
    Y_HIGH,
    Y_LOW,
)
from link_budget.budget_engine import BudgetLedger, compose_ledger, compute_ledger

__all__ = [
    "BudgetError", "DomainError", "InfeasibleError", "LinkAdvisory", "ResourceError",
    "AttackRegime", "ChannelModel", "DetectorModel", "ErrorCorrectionModel",
    "EveCapability", "EveClass", "LinkParameters", "Medium", "RegimeLabel",
    "SecurityParameters", "SourceModel", "Y_HIGH", "Y_LOW",
    "BudgetLedger", "compose_ledger", "compute_ledger",
]
