"""Projective transformations of the spectraplex and the accumulated scaling map."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cone import (
    Array,
    BlockStructure,
    BlockVec,
    congruence,
    identity,
    in_spectraplex,
    inner,
    pd_sqrt_factors,
)


class DomainError(ValueError):
    """A point expected to lie in the spectraplex does not."""


class ZeroVector(ValueError):
    """Cannot normalize a vector with zero trace."""


def _require_spectraplex(x: BlockVec, name: str) -> None:
    if not in_spectraplex(x, 1e-9):
        raise DomainError(f"{name} is not in the spectraplex (trace {x.trace():.12g})")


def apply_Fy(y: BlockVec, x: BlockVec) -> BlockVec:
    """F_y(x) = (e+y)^{1/2} x (e+y)^{1/2} / (1 + <y, x>)."""
    _require_spectraplex(x, "x")
    root = pd_sqrt_factors(identity(y.structure) + y).sqrt
    return congruence(root, x) / (1.0 + inner(y, x))


def apply_Fy_inverse(y: BlockVec, x: BlockVec) -> BlockVec:
    _require_spectraplex(x, "x'")
    inv_root = pd_sqrt_factors(identity(y.structure) + y).inv_sqrt
    z = congruence(inv_root, x)
    return z / z.trace()


@dataclass(frozen=True)
class ScalingState:
    """L(x) = C x C^T blockwise, with C = (e+y_k)^{1/2} ... (e+y_1)^{1/2}."""

    structure: BlockStructure
    forward_blocks: tuple[Array, ...]
    inverse_blocks: tuple[Array, ...]
    k: int = 0

    @classmethod
    def identity(cls, structure: BlockStructure) -> ScalingState:
        eye = tuple(np.eye(s) for s in structure.sizes)
        return cls(structure, eye, eye, 0)

    def condition(self) -> float:
        """Largest 2-norm condition number over the forward factors."""
        return float(max(np.linalg.cond(c) for c in self.forward_blocks))


def compose_scaling(state: ScalingState, y: BlockVec) -> ScalingState:
    """L := L_{e+y} L."""
    f = pd_sqrt_factors(identity(state.structure) + y)
    fwd = tuple(r @ c for r, c in zip(f.sqrt.blocks, state.forward_blocks))
    inv = tuple(c @ r for c, r in zip(state.inverse_blocks, f.inv_sqrt.blocks))
    return ScalingState(state.structure, fwd, inv, state.k + 1)


def _normalized(z: BlockVec) -> BlockVec:
    t = z.trace()
    if not t > 0.0:
        raise ZeroVector(f"cannot normalize to trace one (trace {t:.3e})")
    return z / t


def pull_back(state: ScalingState, x: BlockVec) -> BlockVec:
    """Map a point of the scaled problem back to the original one, in the spectraplex."""
    return _normalized(congruence(state.inverse_blocks, x))


def push_forward(state: ScalingState, x: BlockVec) -> BlockVec:
    """Image of x under the composition of all projective maps applied so far."""
    return _normalized(congruence(state.forward_blocks, x))
