"""Runs solvers on instance sets and computes outcome metrics.

Every solve is a child process with an external watchdog, so a hung
solver can never hang the harness. A run directory holds everything a
later stage (or a rerun) needs: the instances, one log per instance,
records.jsonl, and run_meta.json.
"""

import concurrent.futures
import dataclasses
import hashlib
import json
import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from . import __version__ as _toolkit_version
from .adapters import (
    STATUS_ERROR,
    STATUS_FEASIBLE_TIME_LIMIT,
    STATUS_OPTIMAL,
    STATUS_TIME_LIMIT_NO_INCUMBENT,
    STATUSES,
    get_adapter,
)
from .errors import EmptySet, InvalidSolverConfig, SolverNotFound, ZeroBaselineNodes
from .io import list_instance_files

WATCHDOG_GRACE = 5.0


@dataclass
class SolverConfig:
    # The time limit is deliberately mandatory: every protocol in the
    # toolkit pins its own limit, there is no sensible global one.
    solver_id: str
    time_limit: float
    executable: Optional[str] = None
    threads: int = 1
    seed: int = 0
    params: Dict[str, object] = field(default_factory=dict)
    log_path: Optional[str] = None

    def __post_init__(self):
        if self.time_limit <= 0:
            raise InvalidSolverConfig(f"time_limit must be > 0, got {self.time_limit}")
        if self.threads < 1:
            raise InvalidSolverConfig(f"threads must be >= 1, got {self.threads}")

    def canonical(self):
        """Stable dict for hashing and run_meta. Excludes the log path."""
        return {
            "solver_id": self.solver_id,
            "executable": self.executable,
            "time_limit": self.time_limit,
            "threads": self.threads,
            "seed": self.seed,
            "params": {k: self.params[k] for k in sorted(self.params)},
        }


@dataclass
class SolveRecord:
    instance: str
    status: str
    wall_time: float
    nodes: int
    z_incumbent: Optional[float] = None
    z_bound: Optional[float] = None
    log_path: Optional[str] = None

    def to_json(self):
        return json.dumps(
            {
                "instance": self.instance,
                "status": self.status,
                "wall_time": self.wall_time,
                "nodes": self.nodes,
                "z_incumbent": self.z_incumbent,
                "z_bound": self.z_bound,
                "log_path": self.log_path,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(line):
        doc = json.loads(line)
        return SolveRecord(
            instance=doc["instance"],
            status=doc["status"],
            wall_time=doc["wall_time"],
            nodes=doc["nodes"],
            z_incumbent=doc.get("z_incumbent"),
            z_bound=doc.get("z_bound"),
            log_path=doc.get("log_path"),
        )


@dataclass
class NodeStats:
    count: int
    mean: float
    median: float
    std: float
    max: int
    time_limit_hits: int
    errors_excluded: int


@dataclass
class FeasibilityReport:
    total: int
    feasible: int
    ratio_percent: float
    buckets: Dict[str, int]


@dataclass
class HardnessReport:
    nodes_candidate: NodeStats
    nodes_baseline: NodeStats
    node_relative_error_percent: float
    mean_time_candidate: float
    mean_time_baseline: float
    time_gap_percent: float


def run_solver(instance_path, config):
    """Solve one instance in a child process and classify the outcome.

    The watchdog kills the child at time_limit + 5 s no matter what the
    solver's own limit does. A kill or an unreadable exit report becomes
    status=error; solver failures never raise.
    """
    adapter = get_adapter(config.solver_id)
    exe = adapter.find_executable(config.executable)
    name = os.path.splitext(os.path.basename(instance_path))[0]
    log_path = config.log_path or instance_path + ".log"

    scratch = tempfile.mkdtemp(prefix="milpeval-solve-")
    try:
        argv = adapter.build_command(exe, instance_path, config, scratch)
        deadline = config.time_limit + WATCHDOG_GRACE
        started = time.monotonic()
        with open(log_path, "w") as log_fh:
            try:
                proc = subprocess.Popen(argv, stdout=log_fh, stderr=subprocess.STDOUT)
            except OSError as exc:
                raise SolverNotFound(f"cannot launch {argv[0]}: {exc}")
            try:
                proc.wait(timeout=deadline)
            except subprocess.TimeoutExpired:
                proc.terminate()
                try:
                    proc.wait(timeout=2.0)
                except subprocess.TimeoutExpired:
                    proc.kill()
                    proc.wait()
        measured = time.monotonic() - started
    finally:
        shutil.rmtree(scratch, ignore_errors=True)

    with open(log_path, errors="replace") as fh:
        report = adapter.classify(fh.read())

    if report is None:
        wall = min(measured, config.time_limit + WATCHDOG_GRACE)
        return SolveRecord(name, STATUS_ERROR, wall, 0, None, None, log_path)

    wall = report.solve_time if report.solve_time is not None else measured
    wall = min(wall, config.time_limit + WATCHDOG_GRACE)
    return SolveRecord(
        name, report.status, wall, report.nodes,
        report.z_incumbent, report.z_bound, log_path,
    )


def _file_sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _run_key(instance_paths, config, version):
    h = hashlib.sha256()
    h.update(json.dumps(config.canonical(), sort_keys=True).encode())
    h.update(version.encode())
    for path in instance_paths:
        h.update(os.path.basename(path).encode())
        h.update(_file_sha256(path).encode())
    return h.hexdigest()


def load_records(run_dir):
    records = []
    with open(os.path.join(run_dir, "records.jsonl")) as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(SolveRecord.from_json(line))
    return records


def run_set(instances, config, run_dir, jobs=1):
    """Solve a whole set into run_dir, reusing a previous identical run.

    `instances` is a directory or a list of files. Returns SolveRecords
    in instance-name order. When run_dir already holds records for the
    same (instances, config, solver version) key, no solver is launched.
    """
    if isinstance(instances, (str, os.PathLike)):
        paths = list_instance_files(instances)
    else:
        paths = sorted(instances, key=lambda p: os.path.basename(p))
    if not paths:
        raise EmptySet("no instances to solve")

    adapter = get_adapter(config.solver_id)
    exe = adapter.find_executable(config.executable)
    version = adapter.probe_version(exe)

    inst_dir = os.path.join(run_dir, "instances")
    log_dir = os.path.join(run_dir, "logs")
    os.makedirs(inst_dir, exist_ok=True)
    os.makedirs(log_dir, exist_ok=True)

    local = []
    for src in paths:
        dst = os.path.join(inst_dir, os.path.basename(src))
        if os.path.abspath(src) != os.path.abspath(dst):
            shutil.copyfile(src, dst)
        local.append(dst)

    key = _run_key(local, config, version)
    meta_path = os.path.join(run_dir, "run_meta.json")
    records_path = os.path.join(run_dir, "records.jsonl")
    if os.path.isfile(meta_path) and os.path.isfile(records_path):
        with open(meta_path) as fh:
            meta = json.load(fh)
        if meta.get("run_key") == key:
            return load_records(run_dir)

    def solve_one(path):
        name = os.path.splitext(os.path.basename(path))[0]
        one = dataclasses.replace(config, log_path=os.path.join(log_dir, name + ".log"))
        rec = run_solver(path, one)
        # Keep records.jsonl relocatable: log paths relative to run_dir.
        rec.log_path = os.path.join("logs", name + ".log")
        return rec

    if jobs > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(solve_one, local))
    else:
        records = [solve_one(p) for p in local]
    records.sort(key=lambda r: r.instance)

    with open(records_path, "w") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")
    meta = {
        "config": config.canonical(),
        "solver_version": version,
        "toolkit_version": _toolkit_version,
        "run_key": key,
        "instance_count": len(records),
        "status_counts": {s: sum(1 for r in records if r.status == s) for s in STATUSES},
    }
    with open(meta_path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return records


def feasibility_ratio(records):
    """Share of records that ended feasible and bounded, in percent.

    Time-limit hits without an incumbent count against the ratio but
    get their own bucket so they stay visible.
    """
    if not records:
        raise EmptySet("no solve records")
    buckets = {s: 0 for s in STATUSES}
    for rec in records:
        buckets[rec.status] += 1
    feasible = buckets[STATUS_OPTIMAL] + buckets[STATUS_FEASIBLE_TIME_LIMIT]
    return FeasibilityReport(
        total=len(records),
        feasible=feasible,
        ratio_percent=100.0 * feasible / len(records),
        buckets=buckets,
    )


def _node_stats(records):
    usable = [r for r in records if r.status != STATUS_ERROR]
    errors = len(records) - len(usable)
    hits = sum(
        1
        for r in usable
        if r.status in (STATUS_FEASIBLE_TIME_LIMIT, STATUS_TIME_LIMIT_NO_INCUMBENT)
    )
    if not usable:
        return NodeStats(0, 0.0, 0.0, 0.0, 0, hits, errors), 0
    nodes = np.array([r.nodes for r in usable], dtype=np.float64)
    stats = NodeStats(
        count=len(usable),
        mean=float(nodes.mean()),
        median=float(np.median(nodes)),
        std=float(nodes.std()),
        max=int(nodes.max()),
        time_limit_hits=hits,
        errors_excluded=errors,
    )
    return stats, int(nodes.sum())


def branching_node_report(candidate, baseline):
    """Node statistics for both sets plus the relative error of totals."""
    if not candidate or not baseline:
        raise EmptySet("both record lists must be nonempty")
    cand_stats, cand_sum = _node_stats(candidate)
    base_stats, base_sum = _node_stats(baseline)
    if base_sum <= 0:
        raise ZeroBaselineNodes("baseline set explored zero nodes")
    re_percent = 100.0 * abs(cand_sum - base_sum) / base_sum
    return cand_stats, base_stats, re_percent


def _mean_time(records):
    usable = [r.wall_time for r in records if r.status != STATUS_ERROR]
    if not usable:
        raise EmptySet("no usable records for mean time")
    return float(np.mean(usable))


def solving_time_gap(candidate, baseline):
    """Percentage gap between mean solve times, baseline as reference."""
    if not candidate or not baseline:
        raise EmptySet("both record lists must be nonempty")
    mean_cand = _mean_time(candidate)
    mean_base = _mean_time(baseline)
    return 100.0 * abs(mean_cand - mean_base) / max(mean_base, 1e-10)


def hardness_report(candidate, baseline):
    cand_stats, base_stats, re_percent = branching_node_report(candidate, baseline)
    mean_cand = _mean_time(candidate)
    mean_base = _mean_time(baseline)
    return HardnessReport(
        nodes_candidate=cand_stats,
        nodes_baseline=base_stats,
        node_relative_error_percent=re_percent,
        mean_time_candidate=mean_cand,
        mean_time_baseline=mean_base,
        time_gap_percent=100.0 * abs(mean_cand - mean_base) / max(mean_base, 1e-10),
    )
