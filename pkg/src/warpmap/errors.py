"""Exception hierarchy shared across the package.

Two failure classes matter to callers (and to the CLI exit codes):
invalid inputs or parameter-range violations, and numerical failures
encountered while evaluating or marching (singular points, domain exits,
conservation-budget overruns, CFL violations, NaN blow-ups).
"""


class WarpmapError(Exception):
    """Base class for all package errors."""


class ValidationError(WarpmapError):
    """Bad inputs: unknown names, out-of-range parameters, degenerate frames."""


class NumericalError(WarpmapError):
    """Runtime numerical failure: domain exit, singular evaluation, drift
    budget exceeded, CFL violation, NaN detected."""
