"""Exception hierarchy shared by all spinpurify modules."""


class SpinPurifyError(Exception):
    """Base class for computation errors raised by this package."""


class ContractViolation(SpinPurifyError, ValueError):
    """An input violates an operation's precondition."""


class CapacityError(SpinPurifyError):
    """The requested Hilbert space exceeds the configured spin cap."""


class ConvergenceError(SpinPurifyError):
    """An iterative routine failed to converge."""


class DegenerateInputError(SpinPurifyError, ValueError):
    """Input is valid but the requested quantity is undefined for it."""


class DivergenceError(SpinPurifyError):
    """A target cannot be reached within the allowed number of rounds."""
