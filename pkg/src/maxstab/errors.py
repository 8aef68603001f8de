"""Exception hierarchy shared by the library and the command-line tool."""


class MaxStabError(Exception):
    """Base class for all errors raised by :mod:`maxstab`."""

    exit_code = 1


class DomainError(MaxStabError, ValueError):
    """An argument lies outside the domain of the operation."""

    exit_code = 3


class DataError(MaxStabError, ValueError):
    """Malformed or inconsistent input data (bad CSV, wrong scale, ...)."""

    exit_code = 3

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NumericError(MaxStabError, ArithmeticError):
    """A numerical procedure failed (factorisation, degenerate tail, ...)."""

    exit_code = 4
