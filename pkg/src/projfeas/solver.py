"""Projective scaling algorithm for  A x = 0,  x in int K.

Basic steps drive |P y| toward zero by projecting the origin onto segments
[P y, P u].  Once |P y| <= epsilon, the inequality <y, x> <= epsilon holds for
every solution in the spectraplex, and the problem is rescaled by L_{e+y};
that raises the determinant of every solution by at least 3/2.  The number of
rescalings is therefore bounded by log(U^+/U^-)/log(3/2).
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .cone import BlockVec, EigPair, center, identity, inner, logdet, min_eigpair, pd_sqrt_factors, rank_one
from .constraints import ConstraintMap, KernelProjector, build_projector, rescale_map, residual_inf
from .potential import Calibration, basic_budget, calibrate, scaling_budget
from .projective import ScalingState, compose_scaling, pull_back

log = logging.getLogger(__name__)

DEGENERATE_STEP = 1e-14


class Status(str, enum.Enum):
    FEASIBLE = "feasible"
    INFEASIBLE_AT_LEVEL = "infeasible_at_level"
    BUDGET_EXHAUSTED = "budget_exhausted"


class DegenerateStep(ArithmeticError):
    """P(u - y) vanishes, so the segment [Py, Pu] has no direction."""


class NumericalError(RuntimeError):
    pass


@dataclass
class SolverConfig:
    """Knobs for :func:`solve`.

    ``lambda_threshold`` sets U^- = lambda_threshold^n: exhausting the scaling
    budget proves there is no solution in the spectraplex whose minimum
    eigenvalue is at least this value.  ``log_U_minus`` overrides that bound
    directly.  ``feasibility_eig_tol`` is relative: P y counts as interior when
    its smallest eigenvalue exceeds ``feasibility_eig_tol * (1 + |P y|)``.
    """

    lambda_threshold: float = 1e-3
    feasibility_eig_tol: float = 1e-12
    residual_tol: float = 1e-8
    max_total_iterations: int | None = None
    trace_enabled: bool = False
    seed: int = 0
    reset_after_scaling: bool = False
    log_U_minus: float | None = None

    def validate(self, n: int) -> None:
        if not self.lambda_threshold > 0:
            raise ValueError("lambda_threshold must be positive")
        if self.log_U_minus is None and not self.lambda_threshold < 1.0 / n:
            raise ValueError(f"lambda_threshold must be below 1/n = {1.0 / n:.6g}")
        if not (self.feasibility_eig_tol > 0 and self.residual_tol > 0):
            raise ValueError("tolerances must be positive")

    def resolved_log_U_minus(self, n: int) -> float:
        if self.log_U_minus is not None:
            return float(self.log_U_minus)
        return n * math.log(self.lambda_threshold)


@dataclass
class TraceRecord:
    step_index: int
    k: int
    norm_Py: float
    inv_sq_norm: float
    event: str
    log_potential_of_py_pullback: float | None = None
    condition: float | None = None

    def to_dict(self) -> dict:
        def num(v):
            if v is None or math.isfinite(v):
                return v
            return "inf" if v > 0 else "-inf"

        d = {
            "step_index": self.step_index,
            "k": self.k,
            "norm_Py": num(self.norm_Py),
            "inv_sq_norm": num(self.inv_sq_norm),
            "event": self.event,
        }
        if self.log_potential_of_py_pullback is not None:
            d["log_potential_of_py_pullback"] = num(self.log_potential_of_py_pullback)
        if self.condition is not None:
            d["condition"] = num(self.condition)
        return d


@dataclass
class SolveResult:
    status: Status
    x: BlockVec | None
    scalings_used: int
    basic_steps_used: int
    residual: float
    min_eig: float
    calibration: Calibration
    scaling_budget: int
    basic_budget: int
    lambda_threshold: float
    longest_window: int = 0
    trace: list[TraceRecord] = field(default_factory=list)
    scaling_points: list[BlockVec] = field(default_factory=list)
    state: ScalingState | None = None

    @property
    def feasible(self) -> bool:
        return self.status is Status.FEASIBLE


def _inv_sq(norm: float) -> float:
    return math.inf if norm == 0.0 else norm**-2


def choose_direction_u(py: BlockVec, feasibility_eig_tol: float = 1e-12) -> EigPair | None:
    """Eigenpair defining u = vv^T with <u, P y> = lambda_min(P y), or None if P y is interior.

    min over the spectraplex of <u, P y> equals lambda_min(P y), so None is
    returned exactly when every u gives a positive value.
    """
    pair = min_eigpair(py)
    if pair.value > feasibility_eig_tol * (1.0 + py.norm()):
        return None
    return pair


def direction_to_u(py: BlockVec, pair: EigPair) -> BlockVec:
    return rank_one(py.structure, pair.block_index, pair.vector)


def segment_alpha(py: BlockVec, pu: BlockVec) -> float:
    """Weight alpha with alpha*Py + (1-alpha)*Pu the point of [Py, Pu] nearest the origin."""
    d = pu - py
    dn = d.norm()
    if dn <= DEGENERATE_STEP:
        raise DegenerateStep(f"|P(u - y)| = {dn:.3e}")
    alpha = inner(pu, d) / dn**2
    if alpha < -1e-9 or alpha > 1.0 + 1e-9:
        log.warning("step weight %.3e outside [0, 1]; clamping", alpha)
    return min(1.0, max(0.0, alpha))


def basic_step(p: KernelProjector, y: BlockVec, u: BlockVec) -> BlockVec:
    """One basic-procedure update y <- alpha*y + (1-alpha)*u."""
    alpha = segment_alpha(p.project(y), p.project(u))
    return alpha * y + (1.0 - alpha) * u


def solve(problem: ConstraintMap, config: SolverConfig | None = None) -> SolveResult:
    """Find x in the interior of K with A x = 0, or certify there is none at the threshold level."""
    config = config or SolverConfig()
    structure = problem.structure
    n = structure.n
    config.validate(n)
    cal = calibrate(n, config.resolved_log_U_minus(n))
    k_max = scaling_budget(cal)
    l_max = basic_budget(cal)
    threshold = cal.scaling_threshold
    max_iters = config.max_total_iterations
    if max_iters is None:
        max_iters = (k_max + 1) * l_max

    e = identity(structure)
    a_cur = problem
    proj = build_projector(a_cur)
    state = ScalingState.identity(structure)
    y = center(structure)
    k = steps = window = longest = 0
    trace: list[TraceRecord] = []
    points: list[BlockVec] = []

    def record(event: str, norm: float, **extra) -> None:
        if config.trace_enabled:
            trace.append(TraceRecord(steps, k, norm, _inv_sq(norm), event, **extra))

    def finish(status: Status, x: BlockVec | None = None) -> SolveResult:
        res = residual_inf(problem, x) if x is not None else math.nan
        lam = min_eigpair(x).value if x is not None else math.nan
        return SolveResult(
            status=status, x=x, scalings_used=k, basic_steps_used=steps, residual=res,
            min_eig=lam, calibration=cal, scaling_budget=k_max, basic_budget=l_max,
            lambda_threshold=config.lambda_threshold, longest_window=longest,
            trace=trace, scaling_points=points, state=state,
        )

    record("Start", proj.project(y).norm())
    while k < k_max:
        if steps >= max_iters:
            return finish(Status.BUDGET_EXHAUSTED)
        py = proj.project(y)
        pair = choose_direction_u(py, config.feasibility_eig_tol)
        if pair is None:
            x = pull_back(state, py)
            record("Found", py.norm(), log_potential_of_py_pullback=logdet(x))
            result = finish(Status.FEASIBLE, x)
            limit = config.residual_tol * (1.0 + problem.norm)
            if not (result.residual <= limit and result.min_eig > 0.0):
                raise NumericalError(
                    f"feasible exit failed its own check: residual {result.residual:.3e} (limit {limit:.3e}),"
                    f" min eigenvalue {result.min_eig:.3e}")
            return result

        u = direction_to_u(py, pair)
        pu = proj.project(u)
        try:
            alpha = segment_alpha(py, pu)
        except DegenerateStep:
            if py.norm() > threshold:
                raise NumericalError("degenerate basic step away from the scaling threshold")
            new_norm = py.norm()
        else:
            y = alpha * y + (1.0 - alpha) * u
            new_norm = (alpha * py + (1.0 - alpha) * pu).norm()
        steps += 1
        window += 1
        longest = max(longest, window)
        record("Step", new_norm)

        if new_norm <= threshold:
            points.append(y)
            state = compose_scaling(state, y)
            a_cur = rescale_map(a_cur, pd_sqrt_factors(e + y).inv_sqrt)
            proj = build_projector(a_cur)
            k += 1
            window = 0
            if config.reset_after_scaling:
                y = center(structure)
            record("Scaling", proj.project(y).norm(),
                   condition=state.condition() if config.trace_enabled else None)

    return finish(Status.INFEASIBLE_AT_LEVEL)


@dataclass
class CertificateReport:
    passed: bool
    residual: float
    residual_limit: float
    trace: float
    min_eig: float
    reasons: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "residual": self.residual,
            "residual_limit": self.residual_limit,
            "trace": self.trace,
            "min_eig": self.min_eig,
            "reasons": list(self.reasons),
        }


def verify_certificate(problem: ConstraintMap, x: BlockVec, tol: float = 1e-8) -> CertificateReport:
    """Recheck a candidate solution from scratch: |A x|_inf, trace and positive definiteness.

    Uses explicit per-block traces and LAPACK eigenvalues rather than the
    solver's own flattened products.
    """
    if x.structure != problem.structure:
        raise ValueError(f"solution sizes {x.structure.sizes} do not match problem {problem.structure.sizes}")
    values = []
    for i in range(problem.m):
        values.append(sum(float(np.trace(st[i] @ xb)) for st, xb in zip(problem.stacks, x.blocks)))
    residual = max((abs(v) for v in values), default=0.0)
    norm_a = max((math.sqrt(sum(float(np.sum(st[i] ** 2)) for st in problem.stacks)) for i in range(problem.m)),
                 default=0.0)
    limit = tol * (1.0 + norm_a)
    tr = float(sum(np.trace(b) for b in x.blocks))
    lam = float(min(scipy.linalg.eigvalsh(b)[0] for b in x.blocks))
    reasons = []
    if not residual <= limit:
        reasons.append(f"residual {residual:.3e} exceeds {limit:.3e}")
    if not lam > 0.0:
        reasons.append(f"not positive definite (min eigenvalue {lam:.3e})")
    if not tr > 0.0:
        reasons.append(f"nonpositive trace {tr:.3e}")
    return CertificateReport(not reasons, residual, limit, tr, lam, reasons)
