"""Directed homology and cohomology bimodules of precubical models."""

__version__ = "0.1.0"

from .errors import (DihomError, DomainError, IntegrityError, ModelError, OperandError, PVSyntaxError,
                     UnsupportedDegreeError)
from .linalg import QQ, PrimeField, Rationals, SparseMatrix, get_field, kernel_basis, rank
from .precubical import (Cube, GridSpec, PrecubicalSet, build_grid, check_precubical_identity, complex_from_json,
                         complex_to_json, face, is_proper, iterated_face, length_covering, reachable_pairs)
from .chains import (ChainComplexSlice, CubeChain, FormalChain, boundary, chain_face, complex_slice,
                     enumerate_chains, sgn, tensor)
from .homology import HomologySummary, UnionFind, cohomology_ranks, homology_ranks, pair_summary, path_components
from .bimodule import (BimoduleClass, Cochain, PathAlgebraElement, act, box_tensor, cap, class_basis, coboundary,
                       cohomology_class, conc_product, cup0, homology_class, image_rank)
from .obstacles import (ChainClass, Obstacle, ObstacleModel, betti_profile, cap_chain, cup, enumerate_classes)
from .pvlang import PVProgram, parse, semantics
from .models import LoadedModel, load_model
from .estimator import DirectedCohomology

__all__ = [name for name in dir() if not name.startswith("_")]

