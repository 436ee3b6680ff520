"""Truncated intrinsic mirror algebras of log Calabi-Yau pairs.

Exact-arithmetic tropicalization of snc pairs, theta-function modules with
structure constants from supplied invariant tables, and a rank-2 wall
structure / broken line engine cross-validating the products.
"""

from .errors import (
    InconsistentStrataError,
    MissingInvariantError,
    NotInComplexError,
    ScatteringError,
    ThetaconeError,
    UnboundedFamilyError,
    ValidationError,
)
from .lattice import AffineChart, ConeComplex, parallel_transport
from .pair import PairDescriptor, TropicalSpace, grading, maximality_check, stratum_of, tropicalize
from .series import (
    LaurentElement,
    TruncatedSeries,
    TruncationIdeal,
    exp_nilpotent,
    log_unit,
)
from .solver import Candidate, CandidateSet, assemble_product, candidates
from .theta import InvariantTable, ThetaElement, ThetaRing
from .scattering import (
    ChamberComplex,
    ConsistencyReport,
    Wall,
    WallStructure,
    canonical_walls,
    complete,
    consistency_check,
    cross,
)
from .lines import BrokenLine, enumerate_lines, lift, replay_check, theta_product

__version__ = "0.1.0"
