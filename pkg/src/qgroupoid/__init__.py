"""Finite quantum groupoids: the groupoid dual, its axioms, and corepresentations."""

from .cstar_algebra import CStarAlgebra, LinearMap
from .groupoid import FiniteGroupoid
from .dual_construction import GroupoidDual, build
from .quantum_groupoid import QuantumGroupoidData, verify_all
from .serialization import Instance, load, save

__version__ = "0.1.0"
