"""Following a planted solution through the rescalings.

Each rescaling multiplies the determinant of every trace-one solution by at
least 3/2, and no such determinant can exceed (1/n)^n.  That squeeze is
where the scaling budget comes from.
"""

import math

from projfeas import GeneratorSpec, SolverConfig, generate_instance, solve
from projfeas.cone import logdet, min_eigval
from projfeas.projective import apply_Fy

a, oracle = generate_instance(
    GeneratorSpec([6, 3, 3, 1, 1], m=22, kind="feasible", seed=25, style="boundary", eig_floor=1e-4))
n = a.structure.n
res = solve(a, SolverConfig(lambda_threshold=min(1e-3, min_eigval(oracle.x))))

x = oracle.x
print(f"n = {n}, upper bound log det = {-n * math.log(n):.3f}")
print(f"start: log det x* = {logdet(x):.3f}")
for j, y in enumerate(res.scaling_points, start=1):
    nxt = apply_Fy(y, x)
    print(f"scaling {j}: log det = {logdet(nxt):8.3f}  (gain {logdet(nxt) - logdet(x):.3f} >= {math.log(1.5):.3f})")
    x = nxt
print(f"budget was {res.scaling_budget} scalings; {res.scalings_used} were needed")
