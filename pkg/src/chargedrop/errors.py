"""Exception hierarchy shared by all chargedrop modules."""


class ChargeDropError(Exception):
    """Base class for every error raised by this package."""


class InvalidShapeError(ChargeDropError, ValueError):
    """Polygon violates the convex half-plane body invariants."""


class PreconditionError(ChargeDropError, ValueError):
    """An operation was called outside of its stated domain."""


class UnsupportedCutError(PreconditionError):
    """A cut would remove part of the contact segment."""


class NoCrossingError(PreconditionError):
    """Tangent lines used for a fill competitor do not cross."""


class UnsupportedFillError(PreconditionError):
    """A fill competitor would leave the upper half-plane."""


class ConfigError(ChargeDropError, ValueError):
    pass


class MeshError(ChargeDropError, ValueError):
    pass


class SolverError(ChargeDropError, RuntimeError):
    """Linear solve failed; ``condition`` carries an estimate when known."""

    def __init__(self, message: str, condition: float | None = None):
        super().__init__(message)
        self.condition = condition


class OracleConvergenceError(ChargeDropError, RuntimeError):
    def __init__(self, message: str, gap: float):
        super().__init__(message)
        self.gap = gap


class StagnationError(ChargeDropError, RuntimeError):
    """Line search failed repeatedly; the partial trace is attached."""

    def __init__(self, message: str, trace=None, shape=None):
        super().__init__(message)
        self.trace = trace
        self.shape = shape
