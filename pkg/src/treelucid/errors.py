"""Exception hierarchy shared across the package."""


class TreelucidError(Exception):
    """Base class for all treelucid errors."""


class StructuralError(TreelucidError):
    """Malformed instance, tree, or expression (bad indices, cycles, arity)."""


class ArityError(StructuralError):
    """An operation received an empty or wrongly sized collection."""


class BalanceUndefined(TreelucidError):
    """A class has zero mass, so the balanced reweighting does not exist.

    This is a signal, not a failure: callers treat the offending leaf as pure.
    """


class EmptyCondition(TreelucidError):
    """Conditioning on a zero-mass subset."""


class BudgetError(TreelucidError):
    """A search exceeded its behavior/expression budget.

    ``partial`` carries whatever frontier was computed before the cap hit.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SizeCapError(TreelucidError):
    """A materialized tree would exceed the configured node cap."""


class DerandomizeFailed(TreelucidError):
    """No correct-majority multiset found within the size cap."""


class PreconditionError(TreelucidError):
    """A documented operation precondition does not hold."""
