"""Exception taxonomy for the package.

Every error raised intentionally by this library is an `RLGamesError`
subclass, so callers can distinguish our diagnostics from genuine bugs.
"""


class RLGamesError(Exception):
    """Base class for all errors raised by this package."""


class InputError(RLGamesError, ValueError):
    """Malformed or out-of-contract input (shapes, ranges, NaN payoffs)."""


class ConfigError(InputError):
    """Experiment configuration violates the config schema."""


class ResourceLimitError(RLGamesError):
    """An enumeration or search would exceed its stated budget."""


class NumericError(RLGamesError):
    """An iterative numeric routine failed to reach its tolerance."""


class SolverError(RLGamesError):
    """The LP solver hit its pivot guard or returned an unusable basis."""


class DiagnosticError(RLGamesError):
    """A diagnostic (rate fit, limit set) cannot be computed from the data."""
