"""delta-perturbation and homogenization.

``A x = 0`` is relaxed to ``A xbar = delta * t * A(e)`` with an extra scalar
variable ``t > 0``.  The relaxed problem always has the interior point
``(delta*e, 1)``, so solving it never fails in exact arithmetic, and
``xbar / t`` is an approximate solution of the original system with residual
``delta * A(e)`` before normalization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cone import BlockVec, identity, min_eigval
from .constraints import ConstraintMap, residual_inf
from .solver import SolveResult, SolverConfig, Status, solve


class RayAtInfinity(ValueError):
    """The homogenizing coordinate t vanished, so xbar/t is undefined."""


@dataclass(frozen=True)
class HomogenizedProblem:
    base: ConstraintMap
    delta: float
    original: ConstraintMap
    ae: np.ndarray

    def planted_point(self) -> BlockVec:
        """(delta*e, 1) scaled to trace one; feasible with min eigenvalue delta/(1 + delta*n)."""
        n = self.original.structure.n
        blocks = [self.delta * np.eye(s) for s in self.original.structure.sizes] + [np.ones((1, 1))]
        return BlockVec(self.base.structure, blocks) / (self.delta * n + 1.0)

    def log_U_minus(self) -> float:
        """Potential lower bound from the guaranteed point: (n+1) * ln(delta/(n+1))."""
        n1 = self.base.structure.n
        return n1 * math.log(self.delta / n1)


def homogenize(a: ConstraintMap, delta: float) -> HomogenizedProblem:
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    ae = a.apply(identity(a.structure))
    stacks = list(a.stacks) + [(-delta * ae).reshape(a.m, 1, 1)]
    base = ConstraintMap(a.structure.extended(1), stacks)
    return HomogenizedProblem(base=base, delta=float(delta), original=a, ae=ae)


def restore(hp: HomogenizedProblem, xbar_t: BlockVec, t_tolerance: float = 1e-300) -> tuple[BlockVec, float]:
    """Recover x_hat = (xbar/t)/tr(xbar/t) and the residual bound delta*|A(e)|_inf / tr(xbar/t)."""
    if xbar_t.structure != hp.base.structure:
        raise ValueError(f"expected sizes {hp.base.structure.sizes}, got {xbar_t.structure.sizes}")
    t = float(xbar_t.blocks[-1][0, 0])
    if not t > t_tolerance:
        raise RayAtInfinity(f"homogenizing coordinate t = {t:.3e}")
    z = BlockVec(hp.original.structure, xbar_t.blocks[:-1]) / t
    tr = z.trace()
    ae_inf = float(np.max(np.abs(hp.ae))) if hp.ae.size else 0.0
    return z / tr, hp.delta * ae_inf / tr


@dataclass
class ApproxResult:
    status: Status
    x_hat: BlockVec | None
    residual_bound: float
    residual: float
    min_eig: float
    delta: float
    t: float
    inner: SolveResult

    @property
    def feasible(self) -> bool:
        return self.x_hat is not None


def solve_approx(a: ConstraintMap, delta: float, config: SolverConfig | None = None) -> ApproxResult:
    """Solve the homogenized relaxation and map its solution back to the original blocks."""
    hp = homogenize(a, delta)
    base_cfg = config or SolverConfig()
    cfg = SolverConfig(
        lambda_threshold=delta / (hp.base.structure.n),
        feasibility_eig_tol=base_cfg.feasibility_eig_tol,
        residual_tol=base_cfg.residual_tol,
        max_total_iterations=base_cfg.max_total_iterations,
        trace_enabled=base_cfg.trace_enabled,
        seed=base_cfg.seed,
        reset_after_scaling=base_cfg.reset_after_scaling,
        log_U_minus=hp.log_U_minus(),
    )
    res = solve(hp.base, cfg)
    if res.status is not Status.FEASIBLE:
        return ApproxResult(res.status, None, math.nan, math.nan, math.nan, delta, math.nan, res)
    t = float(res.x.blocks[-1][0, 0])
    x_hat, bound = restore(hp, res.x)
    return ApproxResult(
        status=res.status,
        x_hat=x_hat,
        residual_bound=bound,
        residual=residual_inf(a, x_hat),
        min_eig=min_eigval(x_hat),
        delta=delta,
        t=t,
        inner=res,
    )
