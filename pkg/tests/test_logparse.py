"""Fixture logs are hand-checked; every extracted field is asserted exactly."""

import json
import os

import numpy as np
import pytest

from milpeval.errors import UnrecognizedLog
from milpeval.logparse import (
    CUT_SLOTS,
    SolverInternalFeatures,
    cut_matrix,
    extract_run_features,
    load_features,
    parse_solver_log,
)

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")

ALL_FIXTURES = [
    ("gurobi_branching.log", "gurobi"),
    ("gurobi_root_optimal.log", "gurobi"),
    ("scip_branching.log", "scip"),
    ("highs_time_limit.log", "highs"),
    ("highs_optimal_root.log", "highs"),
    ("highs_infeasible.log", "highs"),
    ("highs_unbounded_lp.log", "highs"),
]


def read(name):
    with open(os.path.join(FIXTURES, name)) as fh:
        return fh.read()


def test_cut_slots_are_frozen():
    assert CUT_SLOTS == (
        "gomory",
        "zero_half",
        "clique",
        "mir",
        "rlt",
        "flow_cover",
        "cover",
        "mod_k",
        "relax_lift",
        "inf_proof",
        "strong_cg",
        "impl_bound",
    )


def test_gurobi_branching_fields():
    f = parse_solver_log(read("gurobi_branching.log"), "gurobi")
    assert f.solver_id == "gurobi"
    assert f.solver_version == "10.0.1"
    # last root row: incumbent 1480, bound 1355, printed gap 8.45%
    assert f.root_gap_percent == 8.45
    assert f.root_gap_grel_percent == 100.0 * abs(1480.0 - 1355.0) / max(1.0, abs(1480.0))
    # one Found-heuristic line plus two H rows; the * row is not heuristic
    assert f.heuristic_success_count == 3
    assert f.cut_vector == [5, 2, 0, 3, 1, 4, 2, 0, 0, 0, 1, 0]
    # 8 node rows + 1 found line + block header + 7 cut lines
    assert f.diagnostics == {"lines_matched": 17, "fields_missing": []}


def test_gurobi_root_optimal_closes_at_final_gap():
    f = parse_solver_log(read("gurobi_root_optimal.log"), "gurobi")
    assert f.solver_version == "10.0.1"
    # Explored 1 nodes + optimal: root processing ends at the final gap
    assert f.root_gap_percent == 0.0
    assert f.root_gap_grel_percent == 0.0
    assert f.heuristic_success_count == 2
    assert f.cut_vector == [2, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]
    # 3 node rows + found line + block header + 1 cut line + final gap line
    assert f.diagnostics == {"lines_matched": 7, "fields_missing": []}


def test_scip_branching_fields():
    f = parse_solver_log(read("scip_branching.log"), "scip")
    assert f.solver_id == "scip"
    assert f.solver_version == "8.0.3"
    # last node==1 row: primal 1480, dual 1355, printed gap 9.23%
    assert f.root_gap_percent == 9.23
    assert f.root_gap_grel_percent == 100.0 * abs(1480.0 - 1355.0) / max(1.0, abs(1480.0))
    # markers t, r, L; the * row is not a letter
    assert f.heuristic_success_count == 3
    # aggregation 5 + cmir 3 both land in the mir slot; cgmip applied 0
    # and the cut pool row are skipped; rapidlearning has no slot
    assert f.cut_vector == [7, 4, 2, 8, 0, 0, 0, 0, 0, 0, 5, 3]
    assert f.diagnostics == {
        "lines_matched": 19,
        "fields_missing": [],
        "unknown_cuts": {"rapidlearning": 4},
    }


def test_highs_time_limit_fields():
    f = parse_solver_log(read("highs_time_limit.log"), "highs")
    assert f.solver_id == "highs"
    assert f.solver_version == "1.8.0"
    # last Proc==0 row: bound 215.1701585, sol 224, printed gap 3.94%
    assert f.root_gap_percent == 3.94
    assert f.root_gap_grel_percent == 100.0 * abs(224.0 - 215.1701585) / max(1.0, abs(224.0))
    # sources u, R, L; S rows are plain LP solves
    assert f.heuristic_success_count == 3
    expected = [0] * 12
    expected[CUT_SLOTS.index("inf_proof")] = 8
    assert f.cut_vector == expected
    assert f.diagnostics == {
        "lines_matched": 7,
        "fields_missing": [],
        "notes": ["cut pool peak 314 not attributable to cut families"],
    }


def test_highs_optimal_root_closes_at_final_gap():
    f = parse_solver_log(read("highs_optimal_root.log"), "highs")
    assert f.solver_version == "1.8.0"
    assert f.root_gap_percent == 0.0
    assert f.root_gap_grel_percent == 0.0
    assert f.heuristic_success_count == 3
    expected = [0] * 12
    expected[CUT_SLOTS.index("inf_proof")] = 5
    assert f.cut_vector == expected
    # 6 node rows + the report gap line
    assert f.diagnostics == {
        "lines_matched": 7,
        "fields_missing": [],
        "notes": ["cut pool peak 22 not attributable to cut families"],
    }


def test_highs_infeasible_has_no_root_gap():
    f = parse_solver_log(read("highs_infeasible.log"), "highs")
    assert f.root_gap_percent is None
    assert f.root_gap_grel_percent is None
    assert f.heuristic_success_count == 0
    assert f.cut_vector == [0] * 12
    assert f.diagnostics == {
        "lines_matched": 1,
        "fields_missing": ["root_gap"],
        "notes": [
            "cut pool peak 0 not attributable to cut families",
            "no root-node incumbent/bound pair observed",
        ],
    }


def test_highs_lp_only_log_yields_empty_features():
    f = parse_solver_log(read("highs_unbounded_lp.log"), "highs")
    assert f.root_gap_percent is None
    assert f.heuristic_success_count == 0
    assert f.cut_vector == [0] * 12
    assert f.diagnostics["lines_matched"] == 0
    assert f.diagnostics["fields_missing"] == ["root_gap"]


def test_truncated_logs_parse_without_raising():
    for name, sid in ALL_FIXTURES:
        text = read(name)
        lines = text.splitlines()
        half = "\n".join(lines[: (len(lines) + 1) // 2])
        full = parse_solver_log(text, sid)
        trunc = parse_solver_log(half, sid)
        # a prefix can only lose events, never gain them
        assert trunc.heuristic_success_count <= full.heuristic_success_count
        assert all(t <= u for t, u in zip(trunc.cut_vector, full.cut_vector))
        assert trunc.diagnostics["lines_matched"] <= full.diagnostics["lines_matched"]


def test_cross_solver_logs_are_rejected():
    with pytest.raises(UnrecognizedLog):
        parse_solver_log(read("gurobi_branching.log"), "highs")
    with pytest.raises(UnrecognizedLog):
        parse_solver_log(read("highs_time_limit.log"), "scip")
    with pytest.raises(UnrecognizedLog):
        parse_solver_log(read("scip_branching.log"), "gurobi")
    with pytest.raises(UnrecognizedLog):
        parse_solver_log("plain text, no solver banner", "gurobi")


def test_unknown_solver_id_is_rejected():
    with pytest.raises(UnrecognizedLog):
        parse_solver_log("anything", "cplex")


def test_extract_run_features_and_reload(tmp_path):
    logs = tmp_path / "logs"
    logs.mkdir()
    (logs / "beta.log").write_text(read("gurobi_root_optimal.log"))
    (logs / "alpha.log").write_text(read("gurobi_branching.log"))
    feats = extract_run_features(str(tmp_path), "gurobi")
    assert [f.instance for f in feats] == ["alpha", "beta"]
    assert feats[0].root_gap_percent == 8.45
    assert feats[1].root_gap_percent == 0.0
    out = tmp_path / "features.jsonl"
    assert out.exists()
    assert load_features(str(out)) == feats


def test_feature_json_round_trip():
    f = parse_solver_log(read("highs_time_limit.log"), "highs")
    f.instance = "inst_0007"
    doc = json.loads(f.to_json())
    assert doc["instance"] == "inst_0007"
    assert doc["cut_vector"][9] == 8
    assert SolverInternalFeatures.from_json(f.to_json()) == f


def test_cut_matrix_shape_and_dtype():
    feats = [
        parse_solver_log(read("gurobi_branching.log"), "gurobi"),
        parse_solver_log(read("scip_branching.log"), "scip"),
    ]
    mat = cut_matrix(feats)
    assert mat.shape == (2, 12)
    assert mat.dtype == np.float64
    assert mat[0].tolist() == [5, 2, 0, 3, 1, 4, 2, 0, 0, 0, 1, 0]
    assert mat[1].tolist() == [7, 4, 2, 8, 0, 0, 0, 0, 0, 0, 5, 3]
