"""Exception types shared across the package."""


class TlpError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(TlpError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateInputError(TlpError, ValueError):
    """Input is formally valid but the requested quantity is undefined on it."""


class NumericUnderflowError(TlpError, ArithmeticError):
    """A linear-domain kernel computation underflowed to zero.

    Retrying with ``log_domain=True`` usually resolves this.
    """


class InstanceTooLargeError(TlpError, ValueError):
    """Problem size exceeds the declared limit of the selected solver."""


class UnsupportedError(TlpError, ValueError):
    """The operation is not defined for this input (e.g. wrong dimension)."""
