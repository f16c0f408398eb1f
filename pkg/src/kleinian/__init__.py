"""Dirichlet domains, presentations and the word problem for arithmetic Kleinian groups."""
from ._accel import backend
from .ball import Isometry, act, dist, isometric_sphere
from .basis import GeneratorSet, Presentation, normalized_basis, presentation
from .errors import KleinianError
from .field import NumberField, dedekind_zeta_2, parse_field
from .poly import ExteriorDomain, compute_exterior, edge_cycles, minimal_defining_set, tangency_cycles
from .quat import QuatOrder, QuaternionAlgebra, covolume, matrix_order
from .reduce import PrecisionBudget, reduce_element, reduce_point
from .vol import lobachevsky, polyhedron_volume

__version__ = "0.1.0"

__all__ = [
    "backend", "Isometry", "act", "dist", "isometric_sphere", "GeneratorSet", "Presentation",
    "normalized_basis", "presentation", "KleinianError", "NumberField", "dedekind_zeta_2",
    "parse_field", "ExteriorDomain", "compute_exterior", "edge_cycles", "minimal_defining_set",
    "tangency_cycles", "QuatOrder", "QuaternionAlgebra", "covolume", "matrix_order",
    "PrecisionBudget", "reduce_element", "reduce_point", "lobachevsky", "polyhedron_volume",
]
