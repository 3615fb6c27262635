"""Nyström low-rank kernel approximation, its error bounds, and restricted kernel classifiers."""

from nystromlab.errors import ConfigError, DataError, DomainError, InputError, NumericalError

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DataError",
    "DomainError",
    "InputError",
    "NumericalError",
]
