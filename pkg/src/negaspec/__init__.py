"""Exact and asymptotic negativity spectra of two intervals of lattice fermions."""

from .errors import (
    ConvergenceError,
    DomainError,
    NegaspecError,
    NumericalError,
    PivotError,
    ValidationError,
)
from .lattice import FermiState, Geometry, make_geometry, make_state

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "NegaspecError",
    "NumericalError",
    "PivotError",
    "ValidationError",
    "FermiState",
    "Geometry",
    "make_geometry",
    "make_state",
]
