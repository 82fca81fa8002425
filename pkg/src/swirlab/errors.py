"""Exception hierarchy shared by all swirlab modules."""


class SwirlabError(Exception):
    """Base class for every error raised by the package."""


class DomainError(SwirlabError, ValueError):
    """An argument or probe region lies outside the admissible domain."""


class ContractError(SwirlabError, ValueError):
    """An input violates a structural contract (field kind, sign, shape)."""


class PreconditionError(SwirlabError, ValueError):
    """A mathematical precondition (e.g. a radius threshold) is not met."""


class SolverError(SwirlabError, RuntimeError):
    """The pressure Poisson solve did not converge.

    Attributes:
        residual: divergence residual reached when iterations ran out.
        step: index of the failing time step, when known.
    """

    def __init__(self, message, residual=float("nan"), step=None):
        super().__init__(message)
        self.residual = residual
        self.step = step


class StepSizeError(SwirlabError, RuntimeError):
    """The configured time step violates the explicit stability bound."""

    def __init__(self, message, dt=float("nan"), limit=float("nan"), step=None):
        super().__init__(message)
        self.dt = dt
        self.limit = limit
        self.step = step
