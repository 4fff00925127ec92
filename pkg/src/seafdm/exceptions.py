"""Shared exception types.

ContractViolation flags a caller-side misuse of a documented interface
(wrong shapes, missing prefix, foreign schedule owner).  ConfigError is
its counterpart for experiment configuration files and CLI arguments.
SolverError wraps numeric failures inside the detector so they surface
with context instead of as bare LAPACK errors.
"""


class ContractViolation(ValueError):
    """An operation was called outside its documented preconditions."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""


class SolverError(RuntimeError):
    """A linear solve inside the detector failed (singular system)."""
