"""Shared error types mapped to CLI exit codes."""


class ConfigError(ValueError):
    """Invalid configuration; names the offending field when known."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class BudgetError(RuntimeError):
    """A computation would exceed a configured memory/size budget."""
