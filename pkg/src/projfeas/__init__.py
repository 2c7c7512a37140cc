"""Projective scaling solver for homogeneous feasibility problems over products of PSD cones.

Solves ``A x = 0`` with ``x`` positive definite in every block, or certifies
that no solution in the spectraplex has minimum eigenvalue at or above a
given level.
"""

from .cone import (
    BlockStructure,
    BlockVec,
    EigPair,
    NotPositiveDefinite,
    PdFactors,
    StructureMismatch,
    center,
    congruence,
    identity,
    inner,
    logdet,
    min_eigpair,
    pd_sqrt_factors,
)
from .constraints import ConstraintMap, KernelProjector, apply_map, build_projector, project, rescale_map
from .io import GeneratorSpec, Kind, generate_instance, parse_problem, read_problem, serialize_problem, write_problem
from .potential import Calibration, basic_budget, calibrate, log_potential, scaling_budget
from .preprocess import HomogenizedProblem, homogenize, restore, solve_approx
from .projective import ScalingState, apply_Fy, apply_Fy_inverse, compose_scaling, pull_back, push_forward
from .solver import SolveResult, SolverConfig, Status, TraceRecord, solve, verify_certificate

__version__ = "0.1.0"
