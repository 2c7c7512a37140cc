"""Homogenized mode: an approximate solution for any system, feasible or not."""

from projfeas import GeneratorSpec, generate_instance
from projfeas.cone import min_eigval
from projfeas.preprocess import homogenize, solve_approx

# Even a certified infeasible system gets an answer: the relaxation
# A x = delta t A(e) always contains (delta e, 1).
a, _ = generate_instance(GeneratorSpec([3, 2], m=3, kind="infeasible", seed=4))
for delta in (1e-1, 1e-2, 1e-3):
    hp = homogenize(a, delta)
    point = hp.planted_point()
    res = solve_approx(a, delta)
    print(f"delta={delta:g}: |A x_hat| = {res.residual:.3e}, bound {res.residual_bound:.3e}, "
          f"min eig {res.min_eig:.3e}, guaranteed point min eig {min_eigval(point):.2e}")

# On a feasible system the residual shrinks with delta.
a, _ = generate_instance(GeneratorSpec([3, 2], m=3, kind="feasible", seed=4))
for delta in (1e-1, 1e-3, 1e-5):
    res = solve_approx(a, delta)
    print(f"feasible, delta={delta:g}: |A x_hat| = {res.residual:.3e}")
