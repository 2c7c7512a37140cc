"""Random test data shared across modules."""

import numpy as np

from projfeas.cone import BlockStructure, BlockVec

ACCEPTANCE_LINES: list[str] = []


def random_symmetric(rng, sizes, scale=1.0):
    st = BlockStructure(tuple(sizes))
    blocks = []
    for s in st.sizes:
        g = rng.standard_normal((s, s))
        blocks.append(scale * (g + g.T) / 2)
    return BlockVec(st, blocks)


def random_psd(rng, sizes, rank=None):
    """Random V V^T per block; ``rank`` limits the number of columns of V."""
    st = BlockStructure(tuple(sizes))
    blocks = []
    for s in st.sizes:
        r = s if rank is None else max(1, min(rank, s))
        v = rng.standard_normal((s, r))
        blocks.append(v @ v.T)
    return BlockVec(st, blocks)


def random_spectraplex(rng, sizes, rank=None):
    x = random_psd(rng, sizes, rank)
    return x / x.trace()


# (sizes, m, seed) for boundary-style planted instances that need several scalings
SCALING_INSTANCES = [([4, 3, 2], 8, 1), ([4, 3, 2], 8, 5), ([4, 3, 2], 8, 6), ([3, 2, 1], 4, 2), ([3, 2, 1], 4, 7),
                     ([3, 3], 5, 3)]


def planted_boundary(sizes, m, seed, eig_floor=1e-4):
    """Boundary-style planted instance plus a threshold the planted point clears."""
    from projfeas.cone import min_eigval
    from projfeas.io import GeneratorSpec, generate_instance

    a, oracle = generate_instance(GeneratorSpec(sizes, m, "feasible", seed, style="boundary", eig_floor=eig_floor))
    lam = min(min_eigval(oracle.x), 0.5 / sum(sizes))
    return a, oracle, lam


def near_orthogonal_pair(rng, sizes, eps):
    """y of deficient rank and x mostly supported on the kernel of y, with <y, x> <= eps.

    Block ranks of y are drawn from 0..n_s, so scalar blocks can vanish.
    Returns None when the draw leaves y with full rank.
    """
    st = BlockStructure(tuple(sizes))
    ranks = [int(rng.integers(0, s + 1)) for s in st.sizes]
    if sum(ranks) == 0 or sum(ranks) == st.n:
        return None
    yb, xb = [], []
    for s, r in zip(st.sizes, ranks):
        q, _ = np.linalg.qr(rng.standard_normal((s, s)))
        v = q[:, :r] * rng.uniform(0.1, 1.0, size=r)
        yb.append(v @ v.T)
        xb.append(q[:, r:] @ q[:, r:].T)
    y = BlockVec(st, yb)
    y = y / y.trace()
    x0 = BlockVec(st, xb)
    x0 = x0 / x0.trace()
    x1 = random_spectraplex(rng, sizes)
    t = min(1.0, rng.uniform(0, 1) * eps / max(float(y.flat() @ x1.flat()), 1e-300))
    return y, (1 - t) * x0 + t * x1
