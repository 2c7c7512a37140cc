"""Problem files, planted-instance generation and result serialization.

Problem file grammar (``#`` starts a comment line)::

    SDFP 1
    m l
    n_1 ... n_l
    k s i j v        # 1-based, i <= j, one line per nonzero upper-triangle entry
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cone import BlockStructure, BlockVec, as_structure, identity
from .constraints import ConstraintMap
from .solver import SolveResult, Status

FORMAT_TAG = "SDFP"
FORMAT_VERSION = 1


class ProblemParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _tokens(text: str):
    """Yield (line_number, fields) for every non-blank, non-comment line."""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            yield lineno, stripped.split()


def parse_problem(text: str) -> ConstraintMap:
    lines = list(_tokens(text))
    if len(lines) < 3:
        raise ProblemParseError("truncated header: need format tag, 'm l' and block sizes")

    (ln, head), (ln_ml, ml), (ln_sz, sz) = lines[:3]
    if len(head) != 2 or head[0] != FORMAT_TAG:
        raise ProblemParseError(f"expected '{FORMAT_TAG} {FORMAT_VERSION}'", ln)
    if head[1] != str(FORMAT_VERSION):
        raise ProblemParseError(f"unsupported format version {head[1]!r}", ln)
    try:
        m, l = (int(t) for t in ml)
    except ValueError:
        raise ProblemParseError("expected two integers 'm l'", ln_ml) from None
    if m < 0 or l < 1:
        raise ProblemParseError(f"invalid counts m={m}, l={l}", ln_ml)
    try:
        sizes = [int(t) for t in sz]
    except ValueError:
        raise ProblemParseError("block sizes must be integers", ln_sz) from None
    if len(sizes) != l or any(s < 1 for s in sizes):
        raise ProblemParseError(f"expected {l} positive block sizes", ln_sz)

    stacks = [np.zeros((m, s, s)) for s in sizes]
    seen: set[tuple[int, int, int, int]] = set()
    for lineno, fields in lines[3:]:
        if len(fields) != 5:
            raise ProblemParseError("entry needs 5 fields 'k s i j v'", lineno)
        try:
            k, s, i, j = (int(t) for t in fields[:4])
            v = float(fields[4])
        except ValueError:
            raise ProblemParseError(f"malformed entry {' '.join(fields)!r}", lineno) from None
        if not 1 <= k <= m:
            raise ProblemParseError(f"constraint index {k} out of range 1..{m}", lineno)
        if not 1 <= s <= l:
            raise ProblemParseError(f"block index {s} out of range 1..{l}", lineno)
        ns = sizes[s - 1]
        if not (1 <= i <= ns and 1 <= j <= ns):
            raise ProblemParseError(f"entry ({i},{j}) outside block of size {ns}", lineno)
        if i > j:
            raise ProblemParseError(f"entry ({i},{j}) is below the diagonal; give the upper triangle", lineno)
        key = (k, s, i, j)
        if key in seen:
            raise ProblemParseError(f"duplicate entry {key}", lineno)
        seen.add(key)
        stacks[s - 1][k - 1, i - 1, j - 1] = v
        stacks[s - 1][k - 1, j - 1, i - 1] = v
    return ConstraintMap(BlockStructure(tuple(sizes)), stacks)


def serialize_problem(a: ConstraintMap, comment: str | None = None) -> str:
    out = []
    if comment:
        out.extend(f"# {c}" for c in comment.splitlines())
    out.append(f"{FORMAT_TAG} {FORMAT_VERSION}")
    out.append(f"{a.m} {a.structure.l}")
    out.append(" ".join(str(s) for s in a.structure.sizes))
    for k in range(a.m):
        for s, st in enumerate(a.stacks):
            block = st[k]
            rows, cols = np.triu_indices(block.shape[0])
            for i, j in zip(rows, cols):
                v = block[i, j]
                if v != 0.0:
                    out.append(f"{k + 1} {s + 1} {i + 1} {j + 1} {float(v)!r}")
    return "\n".join(out) + "\n"


def read_problem(path) -> ConstraintMap:
    with open(path) as fh:
        return parse_problem(fh.read())


def write_problem(path, a: ConstraintMap, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(serialize_problem(a, comment))


class Kind(str, enum.Enum):
    PLANTED_FEASIBLE = "feasible"
    CERTIFIED_INFEASIBLE = "infeasible"


@dataclass
class GeneratorSpec:
    """Instance recipe.

    ``style`` only affects feasible instances.  ``"gaussian"`` orthogonalizes
    random symmetric rows against the planted point; such kernels almost
    always contain a positive definite projection of the center, so the
    solver finishes at once.  ``"boundary"`` plants a point with log-uniform
    eigenvalues in ``[eig_floor, 1]`` and uses rank-one rows
    ``qq^T - <qq^T, x*> e`` along its small-eigenvalue directions, which cuts
    the center off and forces basic steps and scalings.
    """

    sizes: Sequence[int]
    m: int
    kind: Kind = Kind.PLANTED_FEASIBLE
    seed: int = 0
    scale: float = 1.0
    style: str = "gaussian"
    eig_floor: float = 0.1

    def __post_init__(self) -> None:
        self.kind = Kind(self.kind)
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.style not in ("gaussian", "boundary"):
            raise ValueError(f"unknown style {self.style!r}")
        if not 0.0 < self.eig_floor <= 1.0:
            raise ValueError("eig_floor must lie in (0, 1]")


@dataclass
class Oracle:
    """What the generator planted: a solution, or weights with a PD combination of rows."""

    kind: Kind
    x: BlockVec | None = None
    weights: np.ndarray | None = None
    certificate: BlockVec | None = None

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind.value}
        if self.x is not None:
            d["sizes"] = list(self.x.structure.sizes)
            d["x"] = self.x.tolist()
        if self.weights is not None:
            d["weights"] = self.weights.tolist()
        if self.certificate is not None:
            d["sizes"] = list(self.certificate.structure.sizes)
            d["certificate"] = self.certificate.tolist()
        return d


def _random_symmetric(rng: np.random.Generator, s: int) -> np.ndarray:
    g = rng.standard_normal((s, s))
    return (g + g.T) / 2.0


def _random_pd(rng: np.random.Generator, s: int, floor: float = 0.1, log_spread: bool = False) -> np.ndarray:
    q, _ = np.linalg.qr(rng.standard_normal((s, s)))
    if log_spread:
        d = np.exp(rng.uniform(np.log(floor), 0.0, size=s))
    else:
        d = rng.uniform(floor, 1.0, size=s)
    return (q * d) @ q.T


def random_rows(rng: np.random.Generator, structure: BlockStructure, m: int, scale: float = 1.0) -> list[BlockVec]:
    return [BlockVec(structure, [scale * _random_symmetric(rng, s) for s in structure.sizes]) for _ in range(m)]


def random_pd_point(rng: np.random.Generator, structure: BlockStructure,
                    floor: float = 0.1, log_spread: bool = False) -> BlockVec:
    """W diag(d) W^T per block with d in [floor, 1], normalized to trace one."""
    x = BlockVec(structure, [_random_pd(rng, s, floor, log_spread) for s in structure.sizes])
    return x / x.trace()


def _boundary_rows(rng: np.random.Generator, x_star: BlockVec, m: int, scale: float) -> list[BlockVec]:
    structure = x_star.structure
    e = identity(structure)
    rows = []
    for _ in range(m):
        b = int(rng.integers(structure.l))
        _, q_all = np.linalg.eigh(x_star.blocks[b])
        k = (q_all.shape[0] + 1) // 2
        q = q_all[:, :k] @ rng.standard_normal(k)
        q /= np.linalg.norm(q)
        blocks = [np.zeros((s, s)) for s in structure.sizes]
        blocks[b] = np.outer(q, q)
        r = BlockVec(structure, blocks)
        # tr x* = 1, so subtracting <r, x*> e makes the row orthogonal to x*
        rows.append(scale * (r - float(r.flat() @ x_star.flat()) * e))
    return rows


def generate_instance(spec: GeneratorSpec) -> tuple[ConstraintMap, Oracle]:
    """Random instance whose feasibility status is known by construction."""
    rng = np.random.default_rng(spec.seed)
    structure = as_structure(spec.sizes)
    if spec.kind is Kind.PLANTED_FEASIBLE and spec.style == "boundary":
        x_star = random_pd_point(rng, structure, spec.eig_floor, log_spread=True)
        rows = _boundary_rows(rng, x_star, spec.m, spec.scale)
        return ConstraintMap.from_rows(rows, structure), Oracle(Kind.PLANTED_FEASIBLE, x=x_star)
    if spec.kind is Kind.PLANTED_FEASIBLE:
        x_star = random_pd_point(rng, structure, spec.eig_floor)
        xx = float(np.sum(x_star.flat() ** 2))
        rows = []
        for r in random_rows(rng, structure, spec.m, spec.scale):
            c = float(r.flat() @ x_star.flat()) / xx
            rows.append(r - c * x_star)
        return ConstraintMap.from_rows(rows, structure), Oracle(Kind.PLANTED_FEASIBLE, x=x_star)

    weights = np.concatenate([[1.0], rng.uniform(-1.0, 1.0, size=spec.m - 1)])
    rest = random_rows(rng, structure, spec.m - 1, spec.scale)
    cert = BlockVec(structure, [spec.scale * _random_pd(rng, s) for s in structure.sizes])
    first = cert
    for w, r in zip(weights[1:], rest):
        first = first - w * r
    return (
        ConstraintMap.from_rows([first] + rest, structure),
        Oracle(Kind.CERTIFIED_INFEASIBLE, weights=weights, certificate=cert),
    )


def _json_number(v: float):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return None
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def result_to_dict(result: SolveResult, include_trace: bool | None = None, extra: dict | None = None) -> dict:
    d: dict = {
        "status": result.status.value,
        "k": result.scalings_used,
        "steps": result.basic_steps_used,
        "residual": _json_number(result.residual),
        "min_eig": _json_number(result.min_eig),
        "lambda_threshold": result.lambda_threshold,
        "scaling_budget": result.scaling_budget,
        "basic_budget": result.basic_budget,
        "longest_window": result.longest_window,
    }
    if result.x is not None:
        d["sizes"] = list(result.x.structure.sizes)
        d["x"] = result.x.tolist()
    if extra:
        d.update(extra)
    if include_trace is None:
        include_trace = bool(result.trace)
    if include_trace:
        d["trace"] = [r.to_dict() for r in result.trace]
    return d


def emit_result(result: SolveResult, format: str = "text", extra: dict | None = None) -> str:
    """Serialize a result as JSON or as a short human-readable report."""
    if format == "json":
        return json.dumps(result_to_dict(result, extra=extra), indent=2)
    if format != "text":
        raise ValueError(f"unknown format {format!r}")
    head = {
        Status.FEASIBLE: "feasible",
        Status.INFEASIBLE_AT_LEVEL: f"infeasible at level {result.lambda_threshold:g}",
        Status.BUDGET_EXHAUSTED: "iteration budget exhausted",
    }[result.status]
    lines = [f"{head}: k={result.scalings_used} steps={result.basic_steps_used}"
             f" residual={result.residual:.3e} min_eig={result.min_eig:.3e}"]
    for key, val in (extra or {}).items():
        lines.append(f"{key}: {val}")
    if result.x is not None:
        with np.printoptions(precision=6, suppress=True, linewidth=120):
            for s, b in enumerate(result.x.blocks, start=1):
                lines.append(f"block {s}:")
                lines.append(str(b))
    return "\n".join(lines)


def load_solution(path) -> BlockVec:
    """Read the ``sizes``/``x`` fields written by ``emit_result(..., 'json')``."""
    with open(path) as fh:
        data = json.load(fh)
    if "x" not in data:
        raise ValueError(f"{path}: no solution blocks ('x') present")
    blocks = data["x"]
    sizes = data.get("sizes") or [len(b) for b in blocks]
    return BlockVec(BlockStructure(tuple(sizes)), [np.array(b, dtype=np.float64) for b in blocks])
