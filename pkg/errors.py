"""Exception types shared by the heteroperm modules."""


class HeteropermError(Exception):
    """Base class for all heteroperm errors."""


class DomainError(HeteropermError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class BudgetExceededError(HeteropermError):
    """A configured size or search budget would be exceeded."""
