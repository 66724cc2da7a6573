"""Exception taxonomy shared across the package.

Each class carries the process exit code the command-line front door uses:
0 success, 2 invariant violation (including bad preconditions), 3 capacity or
budget exhaustion, 4 parse failure.
"""

from __future__ import annotations


class MalleLabError(Exception):
    """Base class for all package errors."""

    exit_code = 2


class PreconditionError(MalleLabError):
    """An operation was called with inputs outside its contract."""

    exit_code = 2


class InvariantViolationError(MalleLabError):
    """An internal cross-check failed; indicates a bug or inconsistent data."""

    exit_code = 2


class CapacityError(MalleLabError):
    """A configured cap (group size, search box, enumeration budget) was hit.

    Carries optional ``checkpoint`` payload so long enumerations can resume.
    """

    exit_code = 3

    def __init__(self, message: str, checkpoint: object | None = None):
        super().__init__(message)
        self.checkpoint = checkpoint


class DescriptorParseError(MalleLabError):
    """A group descriptor or registry line failed to parse."""

    exit_code = 4

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at column {position + 1})"
        super().__init__(message)
        self.position = position


class UnresolvedDependencyError(MalleLabError):
    """A bound evaluation needs a registry entry that is not available."""

    exit_code = 2
