"""Exception types shared across the solver."""


class ConfigError(ValueError):
    """Invalid run configuration or out-of-range discretisation parameter."""


class InadmissibleStateError(ValueError):
    """A state with non-positive density or pressure, or non-finite entries."""


class PredictorFailure(FloatingPointError):
    """The local space-time predictor produced non-finite coefficients."""

    def __init__(self, cells, message="space-time predictor produced non-finite values"):
        self.cells = cells
        super().__init__(f"{message} in cells {cells}")


class NumericalFailure(RuntimeError):
    """Unrecoverable non-finite state after limiting."""

    def __init__(self, message, dump=None):
        self.dump = dump
        super().__init__(message)
