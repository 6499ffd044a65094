"""Exception hierarchy. The CLI maps these onto exit codes."""


class GspmError(Exception):
    pass


class DomainError(GspmError, ValueError):
    """Argument outside its mathematical domain (e.g. x not in [0, 1])."""


class UnsupportedDegreeError(GspmError, ValueError):
    """Polynomial degree outside the supported range."""


class SizeError(GspmError, ValueError):
    """Size or count parameter too small / too large."""


class DimensionError(GspmError, ValueError):
    """Shape mismatch between coupled arguments."""


class InvalidKernelError(GspmError, ValueError):
    """Kernel violates a structural assumption (ordering, gap, orthonormality)."""


class GraphonRangeError(GspmError, ValueError):
    """Strict-mode graphon evaluated outside [0, 1]."""


class NumericError(GspmError, ArithmeticError):
    """Non-finite value where a finite one is required."""


class ConvergenceError(GspmError, RuntimeError):
    """Iterative eigensolver failed to reach the residual tolerance."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class ExperimentError(GspmError, RuntimeError):
    """Failure inside a Monte Carlo replication, annotated with its index."""

    def __init__(self, message, replication=None):
        super().__init__(message)
        self.replication = replication
