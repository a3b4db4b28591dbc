"""Desk-scale computations for circle-twisted topological graph algebras."""

from .errors import PreconditionError, SchemaError, TGAError, UnsupportedError
from .graph import DiscreteGraph, classify_vertices

__all__ = ["DiscreteGraph", "classify_vertices", "TGAError", "SchemaError", "PreconditionError", "UnsupportedError"]
__version__ = "0.1.0"
