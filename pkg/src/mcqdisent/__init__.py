"""Disentanglement of a Bell pair of molecular charge qubits in random
double-quantum-dot environments.

Units are nm, eV and fs throughout.
"""

from mcqdisent.constants import PhysicalConstants, default_constants
from mcqdisent.errors import (
    CapExceededError,
    ConfigError,
    DomainError,
    GeometryError,
    InvariantViolation,
    McqError,
)

__version__ = "0.1.0"

__all__ = [
    "PhysicalConstants",
    "default_constants",
    "McqError",
    "ConfigError",
    "CapExceededError",
    "GeometryError",
    "DomainError",
    "InvariantViolation",
    "__version__",
]
