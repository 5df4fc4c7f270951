class NumericalError(RuntimeError):
    """Base class for failures of a numerical solver (CLI exit code 3)."""


class SingularSystemError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class InstabilityError(NumericalError):
    pass


class TruncationWarning(UserWarning):
    pass
