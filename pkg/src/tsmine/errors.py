"""Exception hierarchy shared by the library and the CLI."""


class TsmineError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 1


class InputError(TsmineError, ValueError):
    """Bad arguments, malformed files or violated preconditions."""

    exit_code = 2


class DegenerateDataError(TsmineError, ArithmeticError):
    """Numerically degenerate data, e.g. a constant channel."""

    exit_code = 3
