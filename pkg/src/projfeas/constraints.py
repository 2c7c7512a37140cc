"""The constraint operator x -> (<A_1,x>, ..., <A_m,x>) and projection onto its kernel."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import numpy.typing as npt
from scipy.linalg import solve_triangular

from .cone import Array, BlockStructure, BlockVec, StructureMismatch, as_structure


class ConstraintMap:
    """m constraint rows over a block structure; ``apply(x)_i = <A_i, x>``.

    Rows are kept as one stacked ``(m, n_s, n_s)`` array per block so that
    congruence rescaling of all rows is a single batched product.
    """

    def __init__(self, structure: BlockStructure | Sequence[int], stacks: Sequence[npt.ArrayLike]):
        structure = as_structure(structure)
        if len(stacks) != structure.l:
            raise StructureMismatch(f"expected {structure.l} row stacks, got {len(stacks)}")
        stored = []
        m = None
        for size, st in zip(structure.sizes, stacks):
            arr = np.asarray(st, dtype=np.float64)
            if arr.ndim != 3 or arr.shape[1:] != (size, size):
                raise StructureMismatch(f"row stack of shape {arr.shape} for block size {size}")
            if m is None:
                m = arr.shape[0]
            elif arr.shape[0] != m:
                raise StructureMismatch("row stacks disagree on m")
            arr = 0.5 * (arr + arr.transpose(0, 2, 1))
            arr.setflags(write=False)
            stored.append(arr)
        self.structure = structure
        self.stacks = tuple(stored)
        self.m = int(m)

    @classmethod
    def from_rows(cls, rows: Sequence[BlockVec], structure: BlockStructure | Sequence[int] | None = None) -> ConstraintMap:
        if structure is None:
            if not rows:
                raise ValueError("structure is required when there are no rows")
            structure = rows[0].structure
        structure = as_structure(structure)
        for r in rows:
            if r.structure != structure:
                raise StructureMismatch("rows must share one block structure")
        stacks = [
            np.array([r.blocks[s] for r in rows]).reshape(len(rows), n, n)
            for s, n in enumerate(structure.sizes)
        ]
        return cls(structure, stacks)

    @property
    def rows(self) -> list[BlockVec]:
        return [BlockVec(self.structure, [st[i] for st in self.stacks]) for i in range(self.m)]

    def row(self, i: int) -> BlockVec:
        return BlockVec(self.structure, [st[i] for st in self.stacks])

    @cached_property
    def matrix(self) -> Array:
        """Rows flattened into an ``(m, vec_dim)`` matrix."""
        if self.m == 0:
            return np.zeros((0, self.structure.vec_dim))
        return np.concatenate([st.reshape(self.m, -1) for st in self.stacks], axis=1)

    @cached_property
    def norm(self) -> float:
        """max_i |A_i|, the scale used in residual tolerances."""
        if self.m == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.matrix, axis=1)))

    def apply(self, x: BlockVec) -> Array:
        if x.structure != self.structure:
            raise StructureMismatch(f"{x.structure.sizes} vs {self.structure.sizes}")
        return self.matrix @ x.flat()

    def combine(self, coeffs: npt.ArrayLike) -> BlockVec:
        """sum_i c_i A_i."""
        coeffs = np.asarray(coeffs, dtype=np.float64)
        return BlockVec.from_flat(self.structure, coeffs @ self.matrix)

    def __repr__(self) -> str:
        return f"ConstraintMap(sizes={list(self.structure.sizes)}, m={self.m})"


def apply_map(a: ConstraintMap, x: BlockVec) -> Array:
    return a.apply(x)


def residual_inf(a: ConstraintMap, x: BlockVec) -> float:
    if a.m == 0:
        return 0.0
    return float(np.max(np.abs(a.apply(x))))


def pivoted_cholesky(g: Array, drop_tolerance: float) -> tuple[Array, list[int]]:
    """Cholesky with symmetric (diagonal) pivoting, stopping at small pivots.

    Returns lower-triangular ``L`` and the retained indices ``piv`` with
    ``g[piv][:, piv] = L @ L.T``.
    """
    m = g.shape[0]
    work = np.array(g, dtype=np.float64)
    perm = list(range(m))
    L = np.zeros((m, m))
    r = 0
    while r < m:
        d = np.diag(work)[r:]
        j = r + int(np.argmax(d))
        if d[j - r] <= drop_tolerance:
            break
        if j != r:
            work[[r, j], :] = work[[j, r], :]
            work[:, [r, j]] = work[:, [j, r]]
            L[[r, j], :r] = L[[j, r], :r]
            perm[r], perm[j] = perm[j], perm[r]
        piv = np.sqrt(work[r, r])
        L[r, r] = piv
        L[r + 1:, r] = work[r + 1:, r] / piv
        work[r + 1:, r + 1:] -= np.outer(L[r + 1:, r], L[r + 1:, r])
        r += 1
    return L[:r, :r].copy(), perm[:r]


@dataclass(frozen=True)
class KernelProjector:
    """Orthogonal projector onto ker A through a pivoted Cholesky factor of the Gram matrix."""

    source: ConstraintMap
    factor: Array
    retained: tuple[int, ...]
    drop_tolerance: float
    _rows: Array = field(repr=False)

    @property
    def rank(self) -> int:
        return len(self.retained)

    def solve_gram(self, rhs: Array) -> Array:
        """Solve G_RR c = rhs on the retained pivots."""
        if self.rank == 0:
            return np.zeros(0)
        z = solve_triangular(self.factor, rhs, lower=True)
        return solve_triangular(self.factor.T, z, lower=False)

    def project_flat(self, v: Array) -> Array:
        if self.rank == 0:
            return np.array(v, dtype=np.float64)
        out = np.array(v, dtype=np.float64)
        # one step of iterative refinement recovers the accuracy lost to forming G
        for _ in range(2):
            c = self.solve_gram(self._rows @ out)
            out = out - c @ self._rows
        return out

    def project(self, x: BlockVec) -> BlockVec:
        if x.structure != self.source.structure:
            raise StructureMismatch(f"{x.structure.sizes} vs {self.source.structure.sizes}")
        return BlockVec.from_flat(x.structure, self.project_flat(x.flat()))


def build_projector(a: ConstraintMap) -> KernelProjector:
    rows = a.matrix
    if a.m == 0:
        return KernelProjector(a, np.zeros((0, 0)), (), 0.0, rows)
    # Scaled rows can differ in norm by many orders of magnitude, and a drop
    # tolerance relative to the largest diagonal would discard the small ones.
    # Unit rows span the same space and make the tolerance a pure rank test.
    norms = np.linalg.norm(rows, axis=1)
    live = np.flatnonzero(norms > 0.0)
    if live.size == 0:
        return KernelProjector(a, np.zeros((0, 0)), (), 0.0, rows[:0])
    unit = rows[live] / norms[live, None]
    g = unit @ unit.T
    drop = 1e-12 * float(np.max(np.diag(g)))
    factor, retained = pivoted_cholesky(g, drop)
    return KernelProjector(a, factor, tuple(int(live[i]) for i in retained), drop, unit[retained])


def project(p: KernelProjector, x: BlockVec) -> BlockVec:
    return p.project(x)


def rescale_map(a: ConstraintMap, inv_sqrt: BlockVec) -> ConstraintMap:
    """Rows A_i -> S A_i S blockwise with S = (e+y)^{-1/2}, i.e. A' = A o L_{e+y}^{-1}."""
    if inv_sqrt.structure != a.structure:
        raise StructureMismatch(f"{inv_sqrt.structure.sizes} vs {a.structure.sizes}")
    stacks = [s @ st @ s for s, st in zip(inv_sqrt.blocks, a.stacks)]
    return ConstraintMap(a.structure, stacks)
