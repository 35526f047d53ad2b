"""Fault-tolerant resource estimation and VTST kinetics for endofullerene ozone."""

from endoqre.errors import (
    ConfigurationError,
    DomainError,
    EndoqreError,
    FormatError,
    ValidationError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "DomainError",
    "EndoqreError",
    "FormatError",
    "ValidationError",
    "__version__",
]
