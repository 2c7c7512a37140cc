import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_symmetric
from projfeas.cone import BlockVec, min_eigval
from projfeas.constraints import ConstraintMap, residual_inf
from projfeas.io import (
    GeneratorSpec,
    Kind,
    ProblemParseError,
    emit_result,
    generate_instance,
    load_solution,
    parse_problem,
    read_problem,
    result_to_dict,
    serialize_problem,
    write_problem,
)
from projfeas.solver import SolverConfig, solve

MINIMAL = "SDFP 1\n1 2\n1 1\n1 1 1 1 1.0\n1 2 1 1 -1.0\n"


def test_parse_minimal():
    a = parse_problem(MINIMAL)
    assert a.structure.sizes == (1, 1)
    np.testing.assert_array_equal(a.matrix, [[1.0, -1.0]])


def test_parse_offdiagonal_is_symmetric():
    a = parse_problem("# comment\nSDFP 1\n1 1\n2\n1 1 1 2 0.5\n")
    np.testing.assert_array_equal(a.stacks[0][0], [[0.0, 0.5], [0.5, 0.0]])


@pytest.mark.parametrize(
    "text, line",
    [
        ("SDFP 1\n1 1\n2\n1 1 2 1 0.5\n", 4),  # below the diagonal
        ("SDFP 1\n1 1\n2\n1 1 1 1 1\n1 1 1 1 2\n", 5),  # duplicate
        ("SDFP 1\n1 1\n2\n2 1 1 1 1\n", 4),  # constraint index
        ("SDFP 1\n1 1\n2\n1 2 1 1 1\n", 4),  # block index
        ("SDFP 1\n1 1\n2\n1 1 1 3 1\n", 4),  # entry outside block
        ("SDFP 1\n1 1\n2\n1 1 1 1 abc\n", 4),
        ("SDFP 1\n1 1\n2\n1 1 1 1\n", 4),
        ("SDPA 1\n1 1\n2\n", 1),
        ("SDFP 2\n1 1\n2\n", 1),
        ("SDFP 1\n1 2\n2\n", 3),
        ("SDFP 1\nx 1\n2\n", 2),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ProblemParseError) as info:
        parse_problem(text)
    assert info.value.line == line


def test_parse_truncated():
    with pytest.raises(ProblemParseError):
        parse_problem("SDFP 1\n1 1\n")


@given(st.lists(st.integers(1, 4), min_size=1, max_size=3), st.integers(1, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=40)
def test_round_trip(sizes, m, seed):
    rng = np.random.default_rng(seed)
    a = ConstraintMap.from_rows([random_symmetric(rng, sizes) for _ in range(m)])
    b = parse_problem(serialize_problem(a, comment="round\ntrip"))
    assert b.structure == a.structure
    np.testing.assert_allclose(b.matrix, a.matrix, rtol=1e-15, atol=0)


def test_file_round_trip(tmp_path, rng):
    a = ConstraintMap.from_rows([random_symmetric(rng, [2, 1])])
    path = tmp_path / "p.sdfp"
    write_problem(path, a)
    np.testing.assert_array_equal(read_problem(path).matrix, a.matrix)


def test_generator_is_deterministic():
    spec = GeneratorSpec([3, 2], 4, "feasible", seed=9)
    a1, o1 = generate_instance(spec)
    a2, o2 = generate_instance(GeneratorSpec([3, 2], 4, "feasible", seed=9))
    np.testing.assert_array_equal(a1.matrix, a2.matrix)
    assert o1.x.allclose(o2.x, atol=0)
    a3, _ = generate_instance(GeneratorSpec([3, 2], 4, "feasible", seed=10))
    assert not np.array_equal(a1.matrix, a3.matrix)


def test_generator_single_block_example():
    a, oracle = generate_instance(GeneratorSpec([2], 1, Kind.PLANTED_FEASIBLE, seed=7))
    assert residual_inf(a, oracle.x) <= 1e-12
    assert oracle.x.trace() == pytest.approx(1.0)


def test_generator_single_infeasible_row_is_pd():
    a, oracle = generate_instance(GeneratorSpec([1, 1], 1, "infeasible", seed=0))
    assert np.all(a.matrix[0] > 0)
    np.testing.assert_array_equal(oracle.weights, [1.0])


@given(st.lists(st.integers(1, 5), min_size=1, max_size=4), st.integers(1, 8), st.integers(0, 2**32 - 1),
       st.sampled_from(["gaussian", "boundary"]))
@settings(max_examples=60)
def test_generated_oracles(sizes, m, seed, style):
    a, oracle = generate_instance(GeneratorSpec(sizes, m, "feasible", seed, style=style, eig_floor=1e-3))
    assert residual_inf(a, oracle.x) <= 1e-10 * (1 + a.norm)
    assert min_eigval(oracle.x) > 0
    b, cert = generate_instance(GeneratorSpec(sizes, m, "infeasible", seed))
    combo = b.combine(cert.weights)
    assert combo.allclose(cert.certificate, atol=1e-10 * (1 + b.norm))
    assert min_eigval(combo) > 0


def test_lp_generator_has_positive_vector():
    a, oracle = generate_instance(GeneratorSpec([1, 1, 1, 1], 2, "feasible", seed=3))
    assert all(b[0, 0] > 0 for b in oracle.x.blocks)
    assert residual_inf(a, oracle.x) <= 1e-12


def test_generator_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec([2], 0)
    with pytest.raises(ValueError):
        GeneratorSpec([2], 1, style="other")
    with pytest.raises(ValueError):
        GeneratorSpec([2], 1, kind="maybe")


def feasible_result(trace=False):
    return solve(parse_problem(MINIMAL), SolverConfig(trace_enabled=trace))


def test_emit_json_feasible():
    d = json.loads(emit_result(feasible_result(), "json"))
    assert d["status"] == "feasible"
    assert d["x"] == [[[0.5]], [[0.5]]]
    assert "trace" not in d
    for key in ("k", "steps", "residual", "min_eig"):
        assert key in d


def test_emit_json_infeasible_echoes_threshold():
    a = ConstraintMap.from_rows([BlockVec([1], [1.0])])
    r = solve(a, SolverConfig(lambda_threshold=0.25))
    d = json.loads(emit_result(r, "json"))
    assert d["status"] == "infeasible_at_level"
    assert d["lambda_threshold"] == 0.25
    assert d["residual"] is None
    assert "x" not in d


def test_emit_json_with_trace():
    d = json.loads(emit_result(feasible_result(trace=True), "json"))
    assert [t["event"] for t in d["trace"]] == ["Start", "Found"]


def test_emit_text():
    text = emit_result(feasible_result(), "text")
    assert text.splitlines()[0].startswith("feasible: k=0 steps=0")
    assert "block 2:" in text
    with pytest.raises(ValueError):
        emit_result(feasible_result(), "xml")


def test_load_solution(tmp_path):
    r = feasible_result()
    path = tmp_path / "sol.json"
    path.write_text(json.dumps(result_to_dict(r)))
    assert load_solution(path).allclose(r.x, atol=0)
    (tmp_path / "bad.json").write_text("{}")
    with pytest.raises(ValueError):
        load_solution(tmp_path / "bad.json")
