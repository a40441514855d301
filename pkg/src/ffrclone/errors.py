"""Exception hierarchy shared by every module.

Domain errors are caller mistakes (bad parameters, out-of-range Q, an
allocation that no unitary can realize). Consistency errors mean two
independent computations disagree and are treated as bugs.
"""


class DomainError(ValueError):
    """Input outside the physical or mathematical domain of an operation."""


class InfeasibleError(DomainError):
    """The requested quantity does not exist for these parameters."""


class DegenerateError(DomainError):
    """A geometric object degenerates (equal priors, Q = 0, ...)."""


class RegimeError(DomainError):
    """The operation only applies in a different measurement regime."""


class BracketError(RuntimeError):
    """A root finder could not bracket a sign change."""


class ConsistencyError(RuntimeError):
    """Two independent routes to the same quantity disagree."""
