"""Command line entry point: ``projfeas solve|generate|check``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace

from . import io as pio
from .preprocess import solve_approx
from .solver import NumericalError, SolverConfig, Status, solve, verify_certificate

EXIT_FEASIBLE = 0
EXIT_INFEASIBLE = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64
EXIT_PARSE = 65
EXIT_INTERNAL = 70

_STATUS_EXIT = {
    Status.FEASIBLE: EXIT_FEASIBLE,
    Status.INFEASIBLE_AT_LEVEL: EXIT_INFEASIBLE,
    Status.BUDGET_EXHAUSTED: EXIT_BUDGET,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _sizes(text: str) -> list[int]:
    try:
        sizes = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive integers")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="projfeas", description="Projective scaling solver for A x = 0, x positive definite.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve a problem file")
    s.add_argument("file")
    s.add_argument("--mode", choices=("direct", "approx"), default="direct")
    s.add_argument("--delta", type=float, default=1e-3,
                   help="eigenvalue level (direct) or perturbation size (approx)")
    s.add_argument("--tol", type=float, default=1e-8, help="residual tolerance for the final check")
    s.add_argument("--trace", metavar="OUT_JSON", help="write the iteration trace to this file")
    s.add_argument("--max-iters", type=int, default=None)
    s.add_argument("--json", action="store_true", help="print the result as JSON")

    g = sub.add_parser("generate", help="write a random instance with a planted certificate")
    g.add_argument("--sizes", type=_sizes, required=True)
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--kind", choices=("feasible", "infeasible"), default="feasible")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--scale", type=float, default=1.0)
    g.add_argument("--style", choices=("gaussian", "boundary"), default="gaussian")
    g.add_argument("--eig-floor", type=float, default=0.1)
    g.add_argument("-o", "--output", required=True)
    g.add_argument("--oracle", metavar="ORACLE_JSON")

    c = sub.add_parser("check", help="verify a solution against a problem file")
    c.add_argument("file")
    c.add_argument("--solution", required=True)
    c.add_argument("--tol", type=float, default=1e-8)
    return p


def _cmd_solve(args) -> int:
    problem = pio.read_problem(args.file)
    config = SolverConfig(
        lambda_threshold=args.delta,
        residual_tol=args.tol,
        max_total_iterations=args.max_iters,
        trace_enabled=bool(args.trace),
    )
    try:
        if args.mode == "direct":
            result = solve(problem, config)
            extra = {"mode": "direct"}
        else:
            approx = solve_approx(problem, args.delta, config)
            result = approx.inner
            extra = {"mode": "approx", "delta": args.delta}
            if approx.x_hat is not None:
                extra.update(residual_bound=approx.residual_bound, t=approx.t)
                result = replace(result, x=approx.x_hat, residual=approx.residual, min_eig=approx.min_eig)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    if args.trace:
        with open(args.trace, "w") as fh:
            json.dump([r.to_dict() for r in result.trace], fh, indent=1)
    fmt = "json" if args.json else "text"
    if fmt == "json":
        d = pio.result_to_dict(result, include_trace=False, extra=extra)
        print(json.dumps(d, indent=2))
    else:
        print(pio.emit_result(result, "text", extra=extra if args.mode == "approx" else None))
    return _STATUS_EXIT[result.status]


def _cmd_generate(args) -> int:
    try:
        spec = pio.GeneratorSpec(args.sizes, args.m, args.kind, args.seed, args.scale, args.style, args.eig_floor)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    problem, oracle = pio.generate_instance(spec)
    comment = (f"generated: kind={spec.kind.value} style={spec.style} seed={spec.seed} "
               f"sizes={','.join(map(str, args.sizes))} m={spec.m}")
    pio.write_problem(args.output, problem, comment)
    if args.oracle:
        with open(args.oracle, "w") as fh:
            json.dump(oracle.to_dict(), fh, indent=1)
    return 0


def _cmd_check(args) -> int:
    problem = pio.read_problem(args.file)
    try:
        x = pio.load_solution(args.solution)
        report = verify_certificate(problem, x, args.tol)
    except (ValueError, KeyError) as exc:
        raise UsageError(str(exc)) from exc
    print(json.dumps(report.to_dict(), indent=2))
    return 0 if report.passed else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"solve": _cmd_solve, "generate": _cmd_generate, "check": _cmd_check}[args.command]
    try:
        return handler(args)
    except pio.ProblemParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"internal numerical error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
