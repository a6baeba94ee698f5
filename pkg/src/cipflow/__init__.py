"""CIP-stabilized IMEX Crank-Nicolson solver for 2D incompressible flow."""

from .mesh import Mesh2D, build_structured_mesh, make_periodic_x
from .space import FeSpace, build_space
from .params import PhysParams
from .cases import get_case

__all__ = [
    "Mesh2D", "build_structured_mesh", "make_periodic_x",
    "FeSpace", "build_space", "PhysParams", "get_case",
]
