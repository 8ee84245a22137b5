"""Exact calculus for isolated quasihomogeneous hypersurface singularities.

The package computes, in exact rational arithmetic: Milnor/Jacobian algebra
data with the Grothendieck residue pairing, reduction to a good section of
the filtered de Rham module of the singularity (with and without a miniversal
deformation switched on), the recursively-defined primitive form, the flat
structure it induces (flat coordinates, prepotential, WDVV checks), and the
Givental R-matrix attached to a semisimple point of the deformation space.
"""

from .errors import (
    InputSpecError,
    PolyParseError,
    PreconditionError,
    TruncationExhaustedError,
)
from .polyring import MPoly, PolyRing, format_fraction

__all__ = [
    "InputSpecError",
    "PolyParseError",
    "PreconditionError",
    "TruncationExhaustedError",
    "MPoly",
    "PolyRing",
    "format_fraction",
]

__version__ = "0.1.0"
