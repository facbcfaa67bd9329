"""Exception types shared across the solver suite.

The CLI maps ConfigError (and bad command lines) to exit code 2 and
every other WageBandError to exit code 1, so solver code should raise
the most specific subtype it can.
"""


class WageBandError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(WageBandError):
    """Invalid configuration file, flag value, or parameter set."""


class DomainError(WageBandError):
    """Arguments outside the mathematical domain of an operation."""


class SolverError(WageBandError):
    """Base class for numerical failures."""


class NoSolutionError(SolverError):
    """A root or bracket does not exist for the requested inputs."""


class ConvergenceError(SolverError):
    """An iterative routine exhausted its budget without converging."""


class SingularBoundaryError(SolverError):
    """Evaluation at a boundary point where a derivative degenerates."""


class ClassificationError(SolverError):
    """A wage band that does not map to any equilibrium regime."""


class InfeasiblePolicyError(SolverError):
    """Every candidate policy in a search was infeasible."""
