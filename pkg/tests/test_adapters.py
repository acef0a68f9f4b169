"""Exit-report classification and executable resolution per solver."""

import os
import sys

import pytest

from milpeval.adapters import ADAPTERS, BUNDLED, ENV_PREFIX, STATUSES, get_adapter
from milpeval.errors import InvalidSolverConfig, SolverNotFound, UnknownParameter
from milpeval.harness import SolverConfig

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def read(name):
    with open(os.path.join(FIXTURES, name)) as fh:
        return fh.read()


def test_status_vocabulary_is_frozen():
    assert STATUSES == (
        "optimal",
        "feasible-time-limit",
        "infeasible",
        "unbounded",
        "time-limit-no-incumbent",
        "error",
    )


def test_get_adapter_unknown_id():
    with pytest.raises(InvalidSolverConfig):
        get_adapter("cplex")


def test_gurobi_branching_exit_report():
    rep = get_adapter("gurobi").classify(read("gurobi_branching.log"))
    assert rep.status == "optimal"
    assert rep.nodes == 245
    assert rep.z_incumbent == 1450.0
    assert rep.z_bound == 1450.0
    assert rep.solve_time == 0.18
    assert rep.version == "10.0.1"


def test_gurobi_root_optimal_exit_report():
    rep = get_adapter("gurobi").classify(read("gurobi_root_optimal.log"))
    assert rep.status == "optimal"
    assert rep.nodes == 1
    assert rep.z_incumbent == 130.0
    assert rep.z_bound == 130.0
    assert rep.solve_time == 0.01


def test_gurobi_time_limit_without_incumbent():
    text = (
        "Gurobi Optimizer version 10.0.1 build v10.0.1rc0 (linux64)\n"
        "\n"
        "Optimize a model with 2 rows, 2 columns and 4 nonzeros\n"
        "\n"
        "Explored 5000 nodes (90000 simplex iterations) in 30.00 seconds (29.9 work units)\n"
        "\n"
        "Time limit reached\n"
        "Best objective -, best bound 1.200000000000e+01, gap -\n"
    )
    rep = get_adapter("gurobi").classify(text)
    assert rep.status == "time-limit-no-incumbent"
    assert rep.nodes == 5000
    assert rep.z_incumbent is None
    assert rep.z_bound == 12.0


def test_scip_branching_exit_report():
    rep = get_adapter("scip").classify(read("scip_branching.log"))
    assert rep.status == "optimal"
    assert rep.nodes == 245
    assert rep.z_incumbent == 1450.0
    assert rep.z_bound == 1450.0
    assert rep.solve_time == 0.52
    assert rep.version == "8.0.3"


def test_highs_time_limit_exit_report():
    rep = get_adapter("highs").classify(read("highs_time_limit.log"))
    assert rep.status == "feasible-time-limit"
    assert rep.nodes == 0
    assert rep.z_incumbent == 224.0
    assert rep.z_bound == 216.0
    assert rep.solve_time == 1.0
    assert rep.version == "1.8.0"


def test_highs_optimal_root_exit_report():
    rep = get_adapter("highs").classify(read("highs_optimal_root.log"))
    assert rep.status == "optimal"
    assert rep.nodes == 1
    assert rep.z_incumbent == 130.0
    assert rep.z_bound == 130.0
    assert rep.solve_time == 0.0


def test_highs_infeasible_exit_report():
    rep = get_adapter("highs").classify(read("highs_infeasible.log"))
    assert rep.status == "infeasible"
    assert rep.nodes == 0
    assert rep.z_incumbent is None
    assert rep.z_bound is None


def test_highs_lp_unbounded_exit_report():
    rep = get_adapter("highs").classify(read("highs_unbounded_lp.log"))
    assert rep.status == "unbounded"
    assert rep.z_incumbent is None
    assert rep.z_bound is None
    assert rep.solve_time == 0.0


def test_highs_unknown_report_status_is_error():
    text = read("highs_time_limit.log").replace(
        "Status            Time limit reached", "Status            Interrupt"
    )
    rep = get_adapter("highs").classify(text)
    assert rep.status == "error"


def test_classify_plain_text_returns_none():
    for sid in ("gurobi", "scip", "highs"):
        assert ADAPTERS[sid].classify("nothing solver-shaped here") is None


def test_unknown_parameter_rejected():
    with pytest.raises(UnknownParameter):
        ADAPTERS["highs"].check_params({"NoSuchKnob": 1})
    with pytest.raises(UnknownParameter):
        ADAPTERS["scip"].check_params({"separating/nosuch": 1})
    # known names pass silently
    ADAPTERS["gurobi"].check_params({"Heuristics": 0.05, "MIPFocus": 1})
    ADAPTERS["highs"].check_params({"presolve": "on", "mip_heuristic_effort": 0.5})


def test_find_executable_resolution_order(tmp_path, monkeypatch):
    ad = ADAPTERS["highs"]
    exe = tmp_path / "fake_highs"
    exe.write_text("#!/bin/sh\nexit 0\n")
    exe.chmod(0o755)

    assert ad.find_executable(str(exe)) == str(exe)
    assert ad.find_executable(BUNDLED) == BUNDLED

    monkeypatch.setenv(ENV_PREFIX + "HIGHS", str(exe))
    assert ad.find_executable() == str(exe)

    monkeypatch.setenv(ENV_PREFIX + "HIGHS", str(tmp_path / "missing"))
    with pytest.raises(SolverNotFound):
        ad.find_executable()

    monkeypatch.delenv(ENV_PREFIX + "HIGHS")
    monkeypatch.setenv("PATH", str(tmp_path))
    # nothing on PATH, so the in-package runner is the fallback
    assert ad.find_executable() == BUNDLED


def test_missing_solver_raises(tmp_path, monkeypatch):
    monkeypatch.setenv("PATH", str(tmp_path))
    monkeypatch.delenv(ENV_PREFIX + "GUROBI", raising=False)
    with pytest.raises(SolverNotFound):
        ADAPTERS["gurobi"].find_executable()


def test_highs_build_command_bundled(tmp_path):
    cfg = SolverConfig(
        solver_id="highs", time_limit=5.0, threads=2, seed=7, params={"presolve": "on"}
    )
    argv = ADAPTERS["highs"].build_command(BUNDLED, "model.mps", cfg, str(tmp_path))
    assert argv[:3] == [sys.executable, "-m", "milpeval._highs_runner"]
    assert argv[3] == "model.mps"
    with open(argv[4]) as fh:
        options = fh.read()
    assert "time_limit = 5\n" in options
    assert "threads = 2\n" in options
    assert "random_seed = 7\n" in options
    assert "presolve = on\n" in options


def test_gurobi_build_command_argv(tmp_path):
    cfg = SolverConfig(
        solver_id="gurobi",
        time_limit=30.0,
        threads=1,
        seed=3,
        params={"MIPFocus": 1, "Cuts": 2},
    )
    argv = ADAPTERS["gurobi"].build_command("/opt/gurobi_cl", "m.mps", cfg, str(tmp_path))
    assert argv == [
        "/opt/gurobi_cl",
        "Threads=1",
        "TimeLimit=30",
        "Seed=3",
        "Cuts=2",
        "MIPFocus=1",
        "m.mps",
    ]


def test_scip_build_command_argv(tmp_path):
    cfg = SolverConfig(
        solver_id="scip",
        time_limit=10.0,
        threads=1,
        seed=0,
        params={"separating/maxroundsroot": 5},
    )
    argv = ADAPTERS["scip"].build_command("/usr/bin/scip", "m.mps", cfg, str(tmp_path))
    assert argv[0] == "/usr/bin/scip"
    cmds = [argv[i + 1] for i, a in enumerate(argv) if a == "-c"]
    assert cmds == [
        "set limits time 10",
        "set randomization randomseedshift 0",
        "set parallel maxnthreads 1",
        "set separating maxroundsroot 5",
        "read m.mps",
        "optimize",
        "display statistics",
        "quit",
    ]


def test_probe_version_of_bundled_runner():
    v = ADAPTERS["highs"].probe_version(BUNDLED)
    assert v != "unknown"
    assert v[0].isdigit()
