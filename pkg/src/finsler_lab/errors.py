"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class FinslerLabError(Exception):
    """Base class for all errors raised by finsler_lab."""


class DomainError(FinslerLabError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class NumericError(FinslerLabError, ArithmeticError):
    """A computation produced a non-finite or singular intermediate."""


class DivergenceError(NumericError):
    """A volume factor integral failed to converge under refinement."""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class CatalogError(FinslerLabError, KeyError):
    """Unknown name requested from a built-in catalog."""

    def __str__(self) -> str:  # KeyError quotes its message otherwise
        return str(self.args[0]) if self.args else ""


class UnsupportedOperationError(FinslerLabError):
    """The operation is not defined for the given object."""


class ConfigError(FinslerLabError, ValueError):
    """Invalid command-line or configuration-file input."""
