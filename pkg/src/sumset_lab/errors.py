class DomainError(ValueError):
    """Input outside an operation's domain (empty operand, window overrun, ...)."""


class InvariantError(AssertionError):
    """An internal invariant failed; always a bug, never an expected outcome."""
