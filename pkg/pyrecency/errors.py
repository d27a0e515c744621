"""This module contains exceptions raised by pyrecency"""

from typing import Optional


class PyrecencyError(Exception):
    """Base class of all errors raised by pyrecency.

    Every error knows the process exit code the CLI should use for it."""

    exit_code: int = 1


class InvalidParameter(PyrecencyError, ValueError):
    """A parameter lies outside of its admissible range"""

    exit_code = 4


class NonNormalizable(InvalidParameter):
    """Mixing coefficients cannot be normalized (divergent geometric series)"""


class InvalidState(PyrecencyError):
    """An object is not in a state the operation can work with"""

    exit_code = 4


class Unsupported(PyrecencyError):
    """The operation does not support the given input shape"""

    exit_code = 4


class DegenerateWeights(PyrecencyError):
    """All importance weights vanished, no posterior can be formed"""

    exit_code = 3


class InputError(PyrecencyError):
    """Observation input is missing or malformed"""

    exit_code = 2

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line: Optional[int] = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoData(InputError):
    """Observation input contains no records"""
