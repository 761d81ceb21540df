"""Exception types shared across the solver stack."""

from __future__ import annotations

__all__ = ["ConfigError", "HorizonTooLarge", "IterationLimitExceeded", "NumericalAbort"]


class ConfigError(Exception):
    """Invalid run configuration; carries every problem found, not just the first."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {p}" for p in self.problems))


class HorizonTooLarge(Exception):
    """Fixed-point iteration is not contracting on the requested time horizon."""

    def __init__(self, message: str, log=None):
        super().__init__(message)
        self.log = log if log is not None else []


class IterationLimitExceeded(Exception):
    """Iteration budget exhausted before the distance dropped below tolerance."""

    def __init__(self, message: str, log=None):
        super().__init__(message)
        self.log = log if log is not None else []


class NumericalAbort(Exception):
    """Unrecoverable numerical failure (non-finite state or exhausted step control)."""
