"""
Exceptions raised by the link budget, optimizer and oracle modules.
"""


class BudgetError(Exception):
    """Base class for every error raised by this project."""


class DomainError(BudgetError, ValueError):
    """An argument lies outside the domain of a formula or violates a type invariant."""


class InfeasibleError(BudgetError):
    """A requested quantity diverges (e.g. a zero security parameter epsilon)."""


class ResourceError(BudgetError):
    """A request exceeds the resources the simulator is willing to spend."""


class LinkAdvisory(UserWarning):
    """Non-fatal notice about a computed ledger (e.g. a high sifted error rate)."""
