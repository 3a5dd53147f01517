"""Exception hierarchy for the wentzell package.

Failed hypotheses and failed checks are findings reported as values; the
exceptions below signal inputs that cannot be processed at all or numerical
machinery that broke down.
"""

from __future__ import annotations


class WentzellError(Exception):
    """Base for all wentzell errors."""

    def __init__(self, message: str, *, retriable: bool = False):
        super().__init__(message)
        self.message = message
        self.retriable = retriable


class DomainError(WentzellError, ValueError):
    """An argument lies outside the domain of an operation (eps <= 0, d < 0, ...)."""


class GraphError(WentzellError, ValueError):
    """A piecewise graph or expression could not be built."""


class MeshError(WentzellError, ValueError):
    """Degenerate or unsupported geometry."""


class AssemblyError(WentzellError):
    """Operator assembly rejected its inputs or its factorization failed."""

    def __init__(self, message: str, hypothesis: str = ""):
        super().__init__(message)
        self.hypothesis = hypothesis


class CoercivityError(WentzellError):
    """The generalized eigen-solve for the coercivity constant failed."""


class SolverError(WentzellError):
    """Time integration could not continue."""


class NewtonConvergenceError(SolverError):
    """Newton iteration for one backward Euler step did not converge."""

    def __init__(
        self,
        message: str,
        time: float,
        dt: float,
        iterations: int,
        residual: float,
    ):
        super().__init__(message, retriable=True)
        self.time = time
        self.dt = dt
        self.iterations = iterations
        self.residual = residual


class ConfigError(WentzellError):
    """A problem config failed to parse or validate."""

    def __init__(
        self,
        message: str,
        path: str = "",
        line: int | None = None,
        column: int | None = None,
    ):
        super().__init__(message)
        self.path = path
        self.line = line
        self.column = column

    def __str__(self) -> str:
        where = self.path or "<config>"
        if self.line is not None:
            where = f"{where}:{self.line}:{self.column}"
        return f"{where}: {self.message}"
