"""Cycle-basis pose graph optimization benchmark."""
from .errors import CycleBenchError
from .graph import Graph
from .mcb import CycleBasis, fundamental_cycle_basis, minimum_cycle_basis

__version__ = "0.1.0"

__all__ = [
    "CycleBasis",
    "CycleBenchError",
    "Graph",
    "fundamental_cycle_basis",
    "minimum_cycle_basis",
]
