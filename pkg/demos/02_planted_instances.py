"""Generated instances with known answers, solved and rechecked."""

from projfeas import GeneratorSpec, SolverConfig, generate_instance, solve, verify_certificate
from projfeas.cone import min_eigval

# A planted feasible instance: rows are made orthogonal to a positive
# definite x*, so x* itself is a solution.
a, oracle = generate_instance(GeneratorSpec([3, 2, 1], m=4, kind="feasible", seed=42))
res = solve(a)
print(f"gaussian rows: {res.status.value}, {res.basic_steps_used} steps, residual {res.residual:.1e}")

# Rows built from the small-eigenvalue directions of a badly conditioned x*
# cut the center off, so the solver has to take steps and rescale.
spec = GeneratorSpec([6, 3, 3, 1, 1], m=22, kind="feasible", seed=25, style="boundary", eig_floor=1e-4)
a, oracle = generate_instance(spec)
level = min(1e-3, min_eigval(oracle.x))
res = solve(a, SolverConfig(lambda_threshold=level, trace_enabled=True))
print(f"boundary rows: {res.status.value}, {res.scalings_used} scalings, {res.basic_steps_used} steps")

report = verify_certificate(a, res.x)
print("independent check:", report.to_dict())

# Per-window growth of |P y|^-2 from the trace.  Each basic step adds at least 1.
window, start = [], None
for rec in res.trace:
    if rec.event in ("Start", "Scaling"):
        if window:
            print(f"  k={rec.k - 1}: {len(window)} steps, |Py|^-2 {start:.3g} -> {window[-1]:.3g}")
        window, start = [], rec.inv_sq_norm
    elif rec.event == "Step":
        window.append(rec.inv_sq_norm)

# A certified infeasible instance: a combination of the rows is positive definite.
a, cert = generate_instance(GeneratorSpec([4, 2], m=3, kind="infeasible", seed=1))
res = solve(a)
print(f"\ninfeasible: {res.status.value} at level {res.lambda_threshold}, "
      f"{res.scalings_used}/{res.scaling_budget} scalings, min eig of certificate {min_eigval(cert.certificate):.3f}")
