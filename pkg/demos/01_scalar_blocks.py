"""Scalar blocks: the solver on small linear systems with a positivity constraint."""

import numpy as np

from projfeas import BlockVec, ConstraintMap, SolverConfig, solve
from projfeas.projective import apply_Fy

# With every block 1x1 the cone is the positive orthant, and the question is
# whether A x = 0 has a strictly positive solution.
rows = [[1.0, -1.0, 0.0], [0.0, 1.0, -2.0]]
a = ConstraintMap.from_rows([BlockVec([1, 1, 1], r) for r in rows], [1, 1, 1])

res = solve(a)
print("status:", res.status.value)
print("x =", np.round(res.x.flat(), 6))  # proportional to (2, 2, 1), scaled to sum 1
print("A x =", a.apply(res.x))

# A sign-mixed kernel has no positive point.  The solver keeps rescaling
# until the budget proves there is nothing with every entry above the level.
bad = ConstraintMap.from_rows([BlockVec([1, 1, 1], r) for r in ([-1.0, 2.0, 1.0], [-1.0, 0.0, -3.0])], [1, 1, 1])
res = solve(bad, SolverConfig(lambda_threshold=1e-6))
print("\nstatus:", res.status.value, f"after {res.scalings_used} of {res.scaling_budget} scalings")

# The rescaling map F_y pushes mass toward coordinates where y is large.
y = BlockVec([1, 1], [1.0, 0.0])
for x0 in ([0.5, 0.5], [0.05, 0.95]):
    fx = apply_Fy(y, BlockVec([1, 1], x0))
    print(f"F_y{tuple(x0)} = {np.round(fx.flat(), 6).tolist()}")
