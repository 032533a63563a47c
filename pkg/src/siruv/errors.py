"""Exception hierarchy.

Validation problems (bad inputs, bad configs) derive from :class:`ValidationError`;
failures during time stepping derive from :class:`NumericalError`.  The CLI maps the
two families to exit codes 1 and 2.
"""


class SiruvError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SiruvError, ValueError):
    pass


class NumericalError(SiruvError, ArithmeticError):
    pass


class NonSquare(ValidationError):
    def __init__(self, shape):
        self.shape = tuple(shape)
        super().__init__(f"residence matrix must be square, got shape {self.shape}")


class EntryOutOfRange(ValidationError):
    def __init__(self, i, j, value):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"residence matrix entry ({i}, {j}) = {value!r} is outside [0, 1]")


class RowSumViolation(ValidationError):
    def __init__(self, i, total):
        self.i, self.total = i, total
        super().__init__(f"residence matrix row {i} sums to {total!r}, expected 1")


class ZeroEffectivePopulation(ValidationError):
    def __init__(self, j):
        self.j = j
        super().__init__(f"patch {j} has zero effective population (nobody ever visits it)")


class DimensionMismatch(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, msg, line=None, column=None):
        self.line, self.column = line, column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{msg}{where}")


class StepLimitExceeded(NumericalError):
    def __init__(self, t, max_steps):
        self.t, self.max_steps = t, max_steps
        super().__init__(f"step limit {max_steps} exceeded at t={t!r}")


class NonFiniteState(NumericalError):
    def __init__(self, t):
        self.t = t
        super().__init__(f"state became non-finite at t={t!r}")


class ToleranceUnreachable(NumericalError):
    def __init__(self, t, dt):
        self.t, self.dt = t, dt
        super().__init__(f"adaptive step size underflow (dt={dt!r}) at t={t!r}")


class NotConverged(NumericalError):
    def __init__(self, t_end, residual):
        self.t_end, self.residual = t_end, residual
        super().__init__(
            f"no equilibrium found by t={t_end!r}; residual max-norm {residual!r}"
        )
