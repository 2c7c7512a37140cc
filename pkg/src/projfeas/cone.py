"""Block symmetric matrices: the space H = S^{n_1} x ... x S^{n_l} and its PSD cone.

A :class:`BlockVec` is a tuple of dense symmetric blocks.  Blocks of size one
are ordinary nonnegative-orthant coordinates, so linear programs are the
special case where every block is 1x1.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np
import numpy.typing as npt

Array = npt.NDArray[np.float64]


class StructureMismatch(ValueError):
    """Two block vectors (or a vector and a map) disagree on block sizes."""


class NotPositiveDefinite(ValueError):
    """A matrix expected to be positive definite has a small or negative eigenvalue."""


@dataclass(frozen=True)
class BlockStructure:
    """Ordered block dimensions ``n_1, ..., n_l``."""

    sizes: tuple[int, ...]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise ValueError("a block structure needs at least one block")
        if any(s < 1 for s in sizes):
            raise ValueError(f"block sizes must be positive, got {sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def vec_dim(self) -> int:
        return sum(s * s for s in self.sizes)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for s in self.sizes:
            out.append(out[-1] + s * s)
        return tuple(out)

    def extended(self, extra: int = 1) -> BlockStructure:
        return BlockStructure(self.sizes + (extra,))

    def __iter__(self):
        return iter(self.sizes)

    def __len__(self) -> int:
        return len(self.sizes)


def as_structure(sizes: BlockStructure | Sequence[int]) -> BlockStructure:
    if isinstance(sizes, BlockStructure):
        return sizes
    return BlockStructure(tuple(sizes))


class BlockVec:
    """An element of H: one symmetric matrix per block.

    Blocks are symmetrized on construction and stored read-only, so instances
    can be shared freely.
    """

    __slots__ = ("structure", "blocks")

    def __init__(self, structure: BlockStructure | Sequence[int], blocks: Sequence[npt.ArrayLike]):
        structure = as_structure(structure)
        if len(blocks) != structure.l:
            raise StructureMismatch(f"expected {structure.l} blocks, got {len(blocks)}")
        stored = []
        for size, b in zip(structure.sizes, blocks):
            arr = np.array(b, dtype=np.float64)
            if arr.ndim != 2 and arr.size == size * size:
                arr = arr.reshape(size, size)
            if arr.shape != (size, size):
                raise StructureMismatch(f"block of shape {arr.shape} where {(size, size)} expected")
            arr = 0.5 * (arr + arr.T)
            arr.setflags(write=False)
            stored.append(arr)
        self.structure = structure
        self.blocks = tuple(stored)

    @classmethod
    def _wrap(cls, structure: BlockStructure, arrays) -> BlockVec:
        """Adopt fresh arrays that are already symmetric; sums and scalings of stored blocks are, exactly."""
        out = object.__new__(cls)
        for arr in arrays:
            arr.setflags(write=False)
        out.structure = structure
        out.blocks = tuple(arrays)
        return out

    @classmethod
    def from_flat(cls, structure: BlockStructure | Sequence[int], flat: npt.ArrayLike) -> BlockVec:
        structure = as_structure(structure)
        flat = np.asarray(flat, dtype=np.float64)
        off = structure.offsets
        return cls(structure, [flat[off[i]:off[i + 1]].reshape(s, s) for i, s in enumerate(structure.sizes)])

    @classmethod
    def zeros(cls, structure: BlockStructure | Sequence[int]) -> BlockVec:
        structure = as_structure(structure)
        return cls(structure, [np.zeros((s, s)) for s in structure.sizes])

    @classmethod
    def diagonal(cls, structure: BlockStructure | Sequence[int], values: npt.ArrayLike) -> BlockVec:
        """Build a block-diagonal element from the concatenated diagonal ``values``."""
        structure = as_structure(structure)
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (structure.n,):
            raise StructureMismatch(f"need {structure.n} diagonal values, got {values.shape}")
        blocks, start = [], 0
        for s in structure.sizes:
            blocks.append(np.diag(values[start:start + s]))
            start += s
        return cls(structure, blocks)

    def flat(self) -> Array:
        return np.concatenate([b.ravel() for b in self.blocks])

    def _check(self, other: BlockVec) -> None:
        if not isinstance(other, BlockVec):
            raise TypeError(f"expected BlockVec, got {type(other).__name__}")
        if other.structure != self.structure:
            raise StructureMismatch(f"{self.structure.sizes} vs {other.structure.sizes}")

    def __add__(self, other: BlockVec) -> BlockVec:
        self._check(other)
        return BlockVec._wrap(self.structure, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other: BlockVec) -> BlockVec:
        self._check(other)
        return BlockVec._wrap(self.structure, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self) -> BlockVec:
        return BlockVec._wrap(self.structure, [-a for a in self.blocks])

    def __mul__(self, c: float) -> BlockVec:
        return BlockVec._wrap(self.structure, [float(c) * a for a in self.blocks])

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> BlockVec:
        return BlockVec._wrap(self.structure, [a / float(c) for a in self.blocks])

    def trace(self) -> float:
        return float(sum(np.trace(b) for b in self.blocks))

    def norm(self) -> float:
        """Frobenius norm induced by the trace inner product."""
        return float(np.sqrt(sum(np.sum(b * b) for b in self.blocks)))

    def allclose(self, other: BlockVec, atol: float = 1e-12, rtol: float = 0.0) -> bool:
        self._check(other)
        return all(np.allclose(a, b, atol=atol, rtol=rtol) for a, b in zip(self.blocks, other.blocks))

    def tolist(self) -> list:
        return [b.tolist() for b in self.blocks]

    def __repr__(self) -> str:
        return f"BlockVec(sizes={list(self.structure.sizes)}, blocks={self.tolist()})"


@dataclass(frozen=True)
class EigPair:
    value: float
    block_index: int
    vector: Array


@dataclass(frozen=True)
class PdFactors:
    sqrt: BlockVec
    inv_sqrt: BlockVec


def identity(structure: BlockStructure | Sequence[int]) -> BlockVec:
    structure = as_structure(structure)
    return BlockVec._wrap(structure, [np.eye(s) for s in structure.sizes])


def center(structure: BlockStructure | Sequence[int]) -> BlockVec:
    """The spectraplex center e/n."""
    structure = as_structure(structure)
    return identity(structure) / structure.n


def inner(x: BlockVec, y: BlockVec) -> float:
    """Trace inner product sum_s tr(x_s y_s)."""
    x._check(y)
    # blocks are symmetric, so tr(x_s y_s) is the elementwise sum
    return float(sum(np.sum(a * b) for a, b in zip(x.blocks, y.blocks)))


def eigh_block(m: Array) -> tuple[Array, Array]:
    """Eigendecomposition of one symmetric block, ascending eigenvalues.

    Eigenvectors are sign-normalized so that the first nonzero component is
    positive, which makes results reproducible across calls.
    """
    w, q = np.linalg.eigh(m)
    for j in range(q.shape[1]):
        col = q[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-14)
        if nz.size and col[nz[0]] < 0:
            q[:, j] = -col
    return w, q


def eigvals(x: BlockVec) -> Array:
    """All eigenvalues of x, concatenated over blocks (ascending within each block)."""
    return np.concatenate([np.linalg.eigvalsh(b) for b in x.blocks])


def min_eigval(x: BlockVec) -> float:
    return float(min(np.linalg.eigvalsh(b)[0] for b in x.blocks))


def logdet(x: BlockVec) -> float:
    """Log of det x = prod_s det x_s; -inf when x is not positive definite."""
    total = 0.0
    for b in x.blocks:
        w = np.linalg.eigvalsh(b)
        if w[0] <= 0.0:
            return -np.inf
        total += float(np.sum(np.log(w)))
    return total


def min_eigpair(x: BlockVec) -> EigPair:
    """Globally smallest eigenvalue of x with a unit eigenvector.

    Ties go to the smallest block index, then to the lexicographically
    smallest (sign-normalized) eigenvector.
    """
    candidates = []
    for s, b in enumerate(x.blocks):
        w, q = eigh_block(b)
        candidates.append((w, q, s))
    lam = min(float(w[0]) for w, _, _ in candidates)
    tie = 1e-14 * (1.0 + abs(lam))
    for w, q, s in candidates:
        idx = np.flatnonzero(w <= lam + tie)
        if idx.size == 0:
            continue
        vecs = [q[:, j] for j in idx]
        j_best = min(range(len(vecs)), key=lambda j: tuple(np.round(vecs[j], 14)))
        j = int(idx[j_best])
        return EigPair(float(w[j]), s, q[:, j].copy())
    raise AssertionError("unreachable")


def pd_tolerance(a: BlockVec) -> float:
    return 1e-12 * (1.0 + max(float(np.max(np.diag(b))) for b in a.blocks))


def pd_sqrt_factors(a: BlockVec) -> PdFactors:
    """Symmetric square root of a positive definite a and its inverse, per block."""
    tol = pd_tolerance(a)
    roots, inv_roots = [], []
    for s, b in enumerate(a.blocks):
        w, q = eigh_block(b)
        if w[0] <= tol:
            raise NotPositiveDefinite(f"block {s} has eigenvalue {w[0]:.3e} <= {tol:.3e}")
        r = np.sqrt(w)
        roots.append((q * r) @ q.T)
        inv_roots.append((q / r) @ q.T)
    return PdFactors(BlockVec(a.structure, roots), BlockVec(a.structure, inv_roots))


def congruence(c_blocks: Sequence[npt.ArrayLike], x: BlockVec) -> BlockVec:
    """Blockwise C_s x_s C_s^T; C_s may be nonsymmetric.

    ``c_blocks`` may also be a BlockVec (a symmetric factor such as a^{1/2}).
    """
    if isinstance(c_blocks, BlockVec):
        c_blocks = c_blocks.blocks
    if len(c_blocks) != x.structure.l:
        raise StructureMismatch(f"{len(c_blocks)} factors for {x.structure.l} blocks")
    out = []
    for c, b, s in zip(c_blocks, x.blocks, x.structure.sizes):
        c = np.asarray(c, dtype=np.float64)
        if c.shape != (s, s):
            raise StructureMismatch(f"factor of shape {c.shape} for a block of size {s}")
        out.append(c @ b @ c.T)
    return BlockVec(x.structure, out)


def rank_one(structure: BlockStructure | Sequence[int], block_index: int, v: npt.ArrayLike) -> BlockVec:
    """vv^T/|v|^2 placed in one block, zeros elsewhere; an element of the spectraplex."""
    structure = as_structure(structure)
    v = np.asarray(v, dtype=np.float64)
    blocks = [np.zeros((s, s)) for s in structure.sizes]
    blocks[block_index] = np.outer(v, v) / float(v @ v)
    return BlockVec(structure, blocks)


def in_spectraplex(x: BlockVec, tol: float = 1e-9) -> bool:
    return abs(x.trace() - 1.0) <= tol and min_eigval(x) >= -tol
