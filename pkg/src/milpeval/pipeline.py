"""End-to-end instance-set comparison: stages, caching, reports.

A benchmark run compares a baseline instance directory against a
candidate directory inside one output directory. Stages execute in
dependency order (parse and graph features feed structural similarity;
solving feeds the outcome metrics; solve logs feed the internal-feature
comparison), each stage persists its artifact, and a stage failure is
recorded without aborting independent stages. Reruns reuse any artifact
whose content-hash key still matches, so an unchanged run launches no
solver and renders byte-identical JSON.
"""

import csv
import dataclasses
import hashlib
import io as _stdio
import json
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import __version__ as _toolkit_version
from ._seeds import derive_seed
from .errors import InvalidConfig, NoEdges, TooFewRecords, UnknownFormat
from .graphs import FEATURE_NAMES, StructuralFeatureVector, extract_features, to_bipartite
from .harness import (
    STATUS_ERROR,
    SolverConfig,
    branching_node_report,
    feasibility_ratio,
    load_records,
    run_set,
    solving_time_gap,
    _file_sha256,
    _mean_time,
    _node_stats,
)
from .adapters import get_adapter
from .io import list_instance_files, read_instance
from .logparse import CUT_SLOTS, cut_matrix, load_features, parse_solver_log
from .stats import DEFAULT_BINS, structural_similarity, summary_stats, wasserstein1, compare_cut_vectors
from .tuner import default_space, evaluate_generalization, load_space, tune

METRIC_FEASIBILITY = "feasibility"
METRIC_STRUCTURAL = "structural"
METRIC_NODES = "nodes"
METRIC_TIME_GAP = "time_gap"
METRIC_INTERNAL = "internal_features"
METRIC_TUNING = "tuning"

METRICS = (
    METRIC_FEASIBILITY,
    METRIC_STRUCTURAL,
    METRIC_NODES,
    METRIC_TIME_GAP,
    METRIC_INTERNAL,
    METRIC_TUNING,
)

# Tuning is opt-in: it launches budget * |set| fresh solves every time the
# inputs change, far heavier than every other stage combined.
DEFAULT_METRICS = METRICS[:-1]

SET_META_FILENAME = "set_meta.json"

_SOLVER_METRICS = (
    METRIC_FEASIBILITY,
    METRIC_NODES,
    METRIC_TIME_GAP,
    METRIC_INTERNAL,
    METRIC_TUNING,
)


def _norm(value):
    """Force a block to JSON-native types so reports round-trip equal."""
    return json.loads(json.dumps(value))


@dataclass
class BenchmarkConfig:
    """Everything one comparison run needs; mirrors the CLI config file."""

    baseline_dir: str
    candidate_dir: str
    solver: Optional[SolverConfig] = None
    metrics: Tuple[str, ...] = DEFAULT_METRICS
    bins: int = DEFAULT_BINS
    pca_k: int = 3
    seed: int = 0
    out_dir: str = "milpeval_out"
    jobs: int = 1
    tuning_budget: int = 20
    tuning_strategy: str = "random"
    tuning_space_file: Optional[str] = None

    def __post_init__(self):
        unknown = [m for m in self.metrics if m not in METRICS]
        if unknown:
            raise InvalidConfig(f"unknown metrics: {unknown}")
        if not self.metrics:
            raise InvalidConfig("at least one metric must be enabled")
        # Canonical order keeps reports byte-stable however the caller
        # spelled the toggle list.
        self.metrics = tuple(m for m in METRICS if m in self.metrics)
        if self.bins < 2:
            raise InvalidConfig("bins must be at least 2")
        if self.pca_k < 1:
            raise InvalidConfig("pca_k must be at least 1")
        if self.tuning_budget < 1:
            raise InvalidConfig("tuning_budget must be at least 1")
        if self.jobs < 1:
            raise InvalidConfig("jobs must be at least 1")

    def canonical(self):
        doc = {
            "baseline_dir": self.baseline_dir,
            "candidate_dir": self.candidate_dir,
            "solver": self.solver.canonical() if self.solver else None,
            "metrics": list(self.metrics),
            "bins": self.bins,
            "pca_k": self.pca_k,
            "seed": self.seed,
            "out_dir": self.out_dir,
            "jobs": self.jobs,
        }
        if METRIC_TUNING in self.metrics:
            doc["tuning_budget"] = self.tuning_budget
            doc["tuning_strategy"] = self.tuning_strategy
            doc["tuning_space_file"] = self.tuning_space_file
        return doc


def load_benchmark_config(path):
    """Read a config file (JSON mirroring BenchmarkConfig)."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}: not valid JSON ({exc})")
    if not isinstance(doc, dict):
        raise InvalidConfig(f"{path}: expected a JSON object")
    solver = doc.pop("solver", None)
    if solver is not None:
        if not isinstance(solver, dict):
            raise InvalidConfig(f"{path}: 'solver' must be an object")
        solver = SolverConfig(**solver)
    if "metrics" in doc:
        doc["metrics"] = tuple(doc["metrics"])
    try:
        return BenchmarkConfig(solver=solver, **doc)
    except TypeError as exc:
        raise InvalidConfig(f"{path}: {exc}")


@dataclass
class ComparisonReport:
    """Assembled output of run_benchmark; one block per enabled metric."""

    toolkit_version: str
    solver_version: Optional[str]
    config: Dict
    set_meta: Dict
    feasibility: Optional[Dict] = None
    structural: Optional[Dict] = None
    nodes: Optional[Dict] = None
    time_gap: Optional[Dict] = None
    internal_features: Optional[Dict] = None
    tuning: Optional[Dict] = None
    diagnostics: Dict = field(default_factory=dict)

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text):
        return ComparisonReport(**json.loads(text))


@dataclass
class SplitHalfReport:
    """Within-set stability check: one set split into two random halves."""

    seed: int
    size_a: int
    size_b: int
    excluded: int
    comparison: Dict
    samples: Dict

    def to_json(self):
        return json.dumps(dataclasses.asdict(self), sort_keys=True, indent=2) + "\n"

    @staticmethod
    def from_json(text):
        return SplitHalfReport(**json.loads(text))


def _feature_samples(features):
    rows = []
    for feat in features:
        rows.append(
            {
                "instance": feat.instance,
                "root_gap_percent": feat.root_gap_percent,
                "heuristic_success_count": feat.heuristic_success_count,
                "cut_vector": [int(c) for c in feat.cut_vector],
            }
        )
    return rows


def internal_comparison(features_a, features_b, pca_k=3):
    """W1 block between two solver-internal feature lists.

    Root-gap W1 uses only records with a usable root gap (missing gaps
    are counted, not imputed); heuristic counts and cut vectors use
    every record. Cut vectors are compared per retained principal
    component.
    """
    gaps_a = [f.root_gap_percent for f in features_a if f.root_gap_percent is not None]
    gaps_b = [f.root_gap_percent for f in features_b if f.root_gap_percent is not None]
    heur_a = [f.heuristic_success_count for f in features_a]
    heur_b = [f.heuristic_success_count for f in features_b]
    cuts = compare_cut_vectors(cut_matrix(features_a), cut_matrix(features_b), k=pca_k)
    block = {
        "sizes": {"a": len(features_a), "b": len(features_b)},
        "root_gap": {
            "w1": wasserstein1(gaps_a, gaps_b),
            "stats_a": summary_stats(gaps_a),
            "stats_b": summary_stats(gaps_b),
            "excluded_a": len(features_a) - len(gaps_a),
            "excluded_b": len(features_b) - len(gaps_b),
        },
        "heuristics": {
            "w1": wasserstein1(heur_a, heur_b),
            "stats_a": summary_stats(heur_a),
            "stats_b": summary_stats(heur_b),
        },
        "cuts": {
            "per_component_w1": [float(w) for w in cuts.per_component_w1],
            "explained_ratios": [float(r) for r in cuts.explained_ratios],
            "zero_vectors_a": cuts.zero_vectors_a,
            "zero_vectors_b": cuts.zero_vectors_b,
        },
    }
    return _norm(block)


def split_half(features, seed, pca_k=3):
    """Shuffle one feature list and compare its two halves to each other.

    The shuffle is a seeded uniform permutation over the records with a
    usable root gap; the first ⌈n/2⌉ go to half a, the rest to half b.
    """
    usable = [f for f in features if f.root_gap_percent is not None]
    excluded = len(features) - len(usable)
    if len(usable) < 4:
        raise TooFewRecords(
            f"split-half needs at least 4 records with root gaps, got {len(usable)}"
        )
    rng = np.random.default_rng(np.random.PCG64(seed))
    order = rng.permutation(len(usable))
    shuffled = [usable[int(i)] for i in order]
    cut = math.ceil(len(shuffled) / 2)
    half_a, half_b = shuffled[:cut], shuffled[cut:]
    return SplitHalfReport(
        seed=int(seed),
        size_a=len(half_a),
        size_b=len(half_b),
        excluded=excluded,
        comparison=internal_comparison(half_a, half_b, pca_k=pca_k),
        samples=_norm(
            {"a": _feature_samples(half_a), "b": _feature_samples(half_b)}
        ),
    )


def _hash_listing(paths):
    return [(os.path.basename(p), _file_sha256(p)) for p in paths]


def _listing_key(listing, *extra):
    payload = json.dumps([listing, list(extra)], sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def _read_set_meta(directory):
    path = os.path.join(directory, SET_META_FILENAME)
    if not os.path.isfile(path):
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError):
        return {}
    return doc if isinstance(doc, dict) else {}


class _Stages:
    """Bookkeeping for stage statuses and dependency skips."""

    def __init__(self):
        self.status = {}

    def run(self, name, fn, needs=()):
        blocked = [n for n in needs if not self.ok(n)]
        if blocked:
            self.status[name] = f"skipped: needs {', '.join(blocked)}"
            return None
        try:
            result = fn()
        except Exception as exc:  # stage isolation: record, never abort the run
            self.status[name] = f"failed: {exc}"
            return None
        self.status[name] = "ok"
        return result

    def skip(self, name, why):
        self.status[name] = f"skipped: {why}"

    def ok(self, name):
        return self.status.get(name) == "ok"

    @property
    def any_failed(self):
        return any(s.startswith("failed") for s in self.status.values())


def _extract_struct_features(paths, root_seed, set_dir, key):
    """Graph features for one instance set, cached as struct_features.json."""
    cache_path = os.path.join(set_dir, "struct_features.json")
    if os.path.isfile(cache_path):
        with open(cache_path) as fh:
            doc = json.load(fh)
        if doc.get("key") == key:
            feats = [
                (row["instance"], StructuralFeatureVector(**row["values"]))
                for row in doc["features"]
            ]
            return feats, doc.get("excluded", [])

    feats, excluded = [], []
    for path in paths:
        name = os.path.splitext(os.path.basename(path))[0]
        inst = read_instance(path)
        graph = to_bipartite(inst)
        try:
            vec = extract_features(graph, seed=derive_seed(root_seed, "features", name))
        except NoEdges:
            excluded.append(name)
            continue
        feats.append((name, vec))

    os.makedirs(set_dir, exist_ok=True)
    doc = {
        "key": key,
        "excluded": excluded,
        "features": [
            {"instance": name, "values": _norm(vec.as_dict())} for name, vec in feats
        ],
    }
    with open(cache_path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return feats, excluded


def _extract_internal_features(run_dir, records, solver_id):
    """Log features for one solve run, cached as features.jsonl + meta."""
    with open(os.path.join(run_dir, "run_meta.json")) as fh:
        run_key = json.load(fh)["run_key"]

    feat_path = os.path.join(run_dir, "features.jsonl")
    meta_path = os.path.join(run_dir, "features_meta.json")
    if os.path.isfile(feat_path) and os.path.isfile(meta_path):
        with open(meta_path) as fh:
            meta = json.load(fh)
        if meta.get("run_key") == run_key:
            return load_features(feat_path), meta.get("excluded", [])

    feats, excluded = [], []
    for rec in records:
        if rec.status == STATUS_ERROR:
            excluded.append(rec.instance)
            continue
        with open(os.path.join(run_dir, rec.log_path), errors="replace") as fh:
            feat = parse_solver_log(fh.read(), solver_id)
        feat.instance = rec.instance
        feats.append(feat)

    with open(feat_path, "w") as fh:
        for feat in feats:
            fh.write(feat.to_json() + "\n")
    with open(meta_path, "w") as fh:
        json.dump({"run_key": run_key, "excluded": excluded}, fh, sort_keys=True)
        fh.write("\n")
    return feats, excluded


def run_benchmark(config):
    """Run every enabled metric and assemble a ComparisonReport.

    All artifacts land under config.out_dir (per-set solve runs, graph
    features, the tuning result, report.json). Stages that lost a
    dependency are marked skipped; stage errors land in diagnostics.
    """
    for label, directory in (("baseline", config.baseline_dir), ("candidate", config.candidate_dir)):
        if not os.path.isdir(directory):
            raise InvalidConfig(f"{label} directory {directory!r} does not exist")

    stages = _Stages()
    os.makedirs(config.out_dir, exist_ok=True)
    sets = {"baseline": config.baseline_dir, "candidate": config.candidate_dir}
    set_meta = {label: _read_set_meta(d) for label, d in sets.items()}

    paths = {}
    listings = {}

    def ingest():
        for label, directory in sets.items():
            paths[label] = list_instance_files(directory)
            if not paths[label]:
                raise InvalidConfig(f"{label} directory {directory!r} has no instances")
            listings[label] = _hash_listing(paths[label])
        return True

    stages.run("ingest", ingest)
    same_content = stages.ok("ingest") and listings["baseline"] == listings["candidate"]

    report = ComparisonReport(
        toolkit_version=_toolkit_version,
        solver_version=None,
        config=_norm(config.canonical()),
        set_meta=_norm(set_meta),
    )

    # -- structural route: parse -> graph features -> similarity
    struct_feats = {}
    if METRIC_STRUCTURAL in config.metrics:

        def features_for(label):
            def stage():
                key = _listing_key(
                    listings[label], _toolkit_version, config.seed, "struct-features"
                )
                if label == "candidate" and same_content and "baseline" in struct_feats:
                    return struct_feats["baseline"]
                return _extract_struct_features(
                    paths[label], config.seed, os.path.join(config.out_dir, label), key
                )
            return stage

        for label in sets:
            got = stages.run(f"features:{label}", features_for(label), needs=("ingest",))
            if got is not None:
                struct_feats[label] = got

        def structural_stage():
            feats_a = [vec for _, vec in struct_feats["baseline"][0]]
            feats_b = [vec for _, vec in struct_feats["candidate"][0]]
            sim = structural_similarity(feats_a, feats_b, bins=config.bins)
            block = {
                "overall": sim.overall,
                "per_feature": sim.per_feature,
                "bins": sim.bins,
                "sizes": {"baseline": sim.size_a, "candidate": sim.size_b},
                "excluded": {
                    "baseline": struct_feats["baseline"][1],
                    "candidate": struct_feats["candidate"][1],
                },
                "samples": {
                    label: [
                        {"instance": name, **vec.as_dict()}
                        for name, vec in struct_feats[label][0]
                    ]
                    for label in sets
                },
            }
            return _norm(block)

        report.structural = stages.run(
            "structural", structural_stage, needs=("features:baseline", "features:candidate")
        )

    # -- solver route: solve -> outcome metrics, logs -> internal features
    solver_metrics = [m for m in config.metrics if m in _SOLVER_METRICS]
    records = {}
    run_dirs = {}
    if solver_metrics and config.solver is None:
        for label in sets:
            stages.skip(f"solve:{label}", "no solver configured")
        for metric in solver_metrics:
            stages.skip(metric, "no solver configured")
    elif solver_metrics:

        def probe():
            adapter = get_adapter(config.solver.solver_id)
            exe = adapter.find_executable(config.solver.executable)
            return adapter.probe_version(exe)

        version = stages.run("solver", probe)
        if version is not None:
            report.solver_version = version

        need_solves = [m for m in solver_metrics if m != METRIC_TUNING]
        if need_solves:

            def solve_for(label):
                def stage():
                    if label == "candidate" and same_content and "baseline" in records:
                        run_dirs[label] = run_dirs["baseline"]
                        return records["baseline"]
                    run_dir = os.path.join(config.out_dir, label, "run")
                    run_dirs[label] = run_dir
                    return run_set(paths[label], config.solver, run_dir, jobs=config.jobs)
                return stage

            for label in sets:
                got = stages.run(f"solve:{label}", solve_for(label), needs=("ingest", "solver"))
                if got is not None:
                    records[label] = got
            solved = ("solve:baseline", "solve:candidate")

            if METRIC_FEASIBILITY in config.metrics:

                def feasibility_stage():
                    block = {}
                    for label in sets:
                        rep = feasibility_ratio(records[label])
                        block[label] = {
                            "total": rep.total,
                            "feasible": rep.feasible,
                            "ratio_percent": rep.ratio_percent,
                            "buckets": rep.buckets,
                        }
                    return _norm(block)

                report.feasibility = stages.run(
                    METRIC_FEASIBILITY, feasibility_stage, needs=solved
                )

            if METRIC_NODES in config.metrics:

                def nodes_stage():
                    cand_stats, base_stats, re_percent = branching_node_report(
                        records["candidate"], records["baseline"]
                    )
                    block = {
                        "candidate": dataclasses.asdict(cand_stats),
                        "baseline": dataclasses.asdict(base_stats),
                        "relative_error_percent": re_percent,
                    }
                    return _norm(block)

                report.nodes = stages.run(METRIC_NODES, nodes_stage, needs=solved)

            if METRIC_TIME_GAP in config.metrics:

                def time_gap_stage():
                    gap = solving_time_gap(records["candidate"], records["baseline"])
                    block = {
                        "mean_time_candidate": _mean_time(records["candidate"]),
                        "mean_time_baseline": _mean_time(records["baseline"]),
                        "gap_percent": gap,
                        "sizes": {
                            "baseline": len(records["baseline"]),
                            "candidate": len(records["candidate"]),
                        },
                    }
                    return _norm(block)

                report.time_gap = stages.run(METRIC_TIME_GAP, time_gap_stage, needs=solved)

            if METRIC_INTERNAL in config.metrics:
                internal_feats = {}

                def extract_for(label):
                    def stage():
                        if (
                            label == "candidate"
                            and same_content
                            and "baseline" in internal_feats
                        ):
                            return internal_feats["baseline"]
                        return _extract_internal_features(
                            run_dirs[label], records[label], config.solver.solver_id
                        )
                    return stage

                for label in sets:
                    got = stages.run(
                        f"extract:{label}", extract_for(label), needs=(f"solve:{label}",)
                    )
                    if got is not None:
                        internal_feats[label] = got

                def internal_stage():
                    feats_a, err_a = internal_feats["baseline"]
                    feats_b, err_b = internal_feats["candidate"]
                    block = internal_comparison(feats_a, feats_b, pca_k=config.pca_k)
                    block["labels"] = {"a": "baseline", "b": "candidate"}
                    block["error_records"] = {"a": err_a, "b": err_b}
                    block["samples"] = {
                        "baseline": _feature_samples(feats_a),
                        "candidate": _feature_samples(feats_b),
                    }
                    return _norm(block)

                report.internal_features = stages.run(
                    METRIC_INTERNAL,
                    internal_stage,
                    needs=("extract:baseline", "extract:candidate"),
                )

        if METRIC_TUNING in config.metrics:

            def tuning_stage():
                tune_seed = derive_seed(config.seed, "tuning")
                key = _listing_key(
                    listings["candidate"],
                    listings["baseline"],
                    config.solver.canonical(),
                    report.solver_version,
                    config.tuning_budget,
                    config.tuning_strategy,
                    config.tuning_space_file,
                    tune_seed,
                )
                result_path = os.path.join(config.out_dir, "tuning_result.json")
                meta_path = os.path.join(config.out_dir, "tuning_meta.json")
                if os.path.isfile(result_path) and os.path.isfile(meta_path):
                    with open(meta_path) as fh:
                        if json.load(fh).get("key") == key:
                            with open(result_path) as fh:
                                return json.load(fh)

                if config.tuning_space_file:
                    space = load_space(config.tuning_space_file)
                else:
                    space = default_space(config.solver.solver_id)
                # Tune on the candidate set, measure generalization on
                # the baseline set.
                result = tune(
                    space,
                    paths["candidate"],
                    config.solver,
                    budget=config.tuning_budget,
                    strategy=config.tuning_strategy,
                    seed=tune_seed,
                    jobs=config.jobs,
                )
                result = evaluate_generalization(
                    result, paths["baseline"], config.solver, jobs=config.jobs
                )
                block = _norm(dataclasses.asdict(result))
                with open(result_path, "w") as fh:
                    json.dump(block, fh, sort_keys=True, indent=2)
                    fh.write("\n")
                with open(meta_path, "w") as fh:
                    json.dump({"key": key}, fh, sort_keys=True)
                    fh.write("\n")
                return block

            report.tuning = stages.run(METRIC_TUNING, tuning_stage, needs=("ingest", "solver"))

    report.diagnostics = dict(sorted(stages.status.items()))
    with open(os.path.join(config.out_dir, "report.json"), "w") as fh:
        fh.write(report.to_json())
    return report


def benchmark_failed(report):
    """True when any stage of the run recorded a failure."""
    return any(s.startswith("failed") for s in report.diagnostics.values())


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return "%.6g" % value
    return str(value)


def _md_table(headers, rows):
    lines = [
        "| " + " | ".join(headers) + " |",
        "|" + "|".join(" --- " for _ in headers) + "|",
    ]
    for row in rows:
        lines.append("| " + " | ".join(_fmt(c) for c in row) + " |")
    return lines


def _set_label(set_meta, name):
    meta = set_meta.get(name) or {}
    parts = [str(meta[k]) for k in ("problem", "model") if meta.get(k)]
    if meta.get("eta") is not None:
        parts.append(f"eta={meta['eta']}")
    if parts:
        return " / ".join(parts)
    return str(meta.get("label", name))


def _md_internal_block(block, name_a, name_b):
    lines = []
    rows = []
    for title, part in (("root gap %", block["root_gap"]), ("heuristic successes", block["heuristics"])):
        rows.append(
            (
                title,
                part["w1"],
                part["stats_a"]["mean"],
                part["stats_a"]["std"],
                part["stats_b"]["mean"],
                part["stats_b"]["std"],
            )
        )
    lines += _md_table(
        ["feature", "W1", f"mean {name_a}", f"std {name_a}", f"mean {name_b}", f"std {name_b}"],
        rows,
    )
    lines.append("")
    cuts = block["cuts"]
    pc_headers = [f"PC{i + 1} W1" for i in range(len(cuts["per_component_w1"]))]
    lines += _md_table(pc_headers, [tuple(cuts["per_component_w1"])])
    lines.append(
        "explained variance ratios: "
        + ", ".join(_fmt(r) for r in cuts["explained_ratios"])
    )
    return lines


def _render_markdown_comparison(report):
    lines = ["# Instance-set comparison", ""]
    lines.append(f"- toolkit version: {report.toolkit_version}")
    if report.solver_version:
        lines.append(f"- solver: {report.solver_version}")
    cfg = report.config
    lines.append(f"- seed: {cfg.get('seed')}, bins: {cfg.get('bins')}, pca_k: {cfg.get('pca_k')}")
    lines.append("")

    lines.append("## Sets")
    lines.append("")
    meta_rows = []
    for name in ("baseline", "candidate"):
        meta = report.set_meta.get(name) or {}
        meta_rows.append(
            (
                name,
                _set_label(report.set_meta, name),
                meta.get("problem", ""),
                meta.get("model", ""),
                meta.get("eta", ""),
                cfg.get(f"{name}_dir", ""),
            )
        )
    lines += _md_table(["set", "label", "problem", "model", "eta", "directory"], meta_rows)
    lines.append("")

    if report.feasibility is not None:
        lines.append("## Feasibility")
        lines.append("")
        bucket_names = sorted(report.feasibility["baseline"]["buckets"])
        headers = ["set", "total", "feasible", "ratio %"] + bucket_names
        rows = []
        for name in ("baseline", "candidate"):
            part = report.feasibility[name]
            rows.append(
                tuple(
                    [name, part["total"], part["feasible"], part["ratio_percent"]]
                    + [part["buckets"][b] for b in bucket_names]
                )
            )
        lines += _md_table(headers, rows)
        lines.append("")

    if report.structural is not None:
        lines.append("## Structural similarity")
        lines.append("")
        lines.append(f"overall similarity: {_fmt(report.structural['overall'])}")
        lines.append("")
        rows = [(n, report.structural["per_feature"][n]) for n in FEATURE_NAMES]
        lines += _md_table(["feature", "similarity"], rows)
        lines.append("")

    if report.nodes is not None:
        lines.append("## Branching nodes")
        lines.append("")
        rows = []
        for name in ("baseline", "candidate"):
            part = report.nodes[name]
            rows.append(
                (
                    name,
                    part["count"],
                    part["mean"],
                    part["median"],
                    part["std"],
                    part["max"],
                    part["time_limit_hits"],
                )
            )
        lines += _md_table(
            ["set", "count", "mean", "median", "std", "max", "time-limit hits"], rows
        )
        lines.append("")
        lines.append(
            f"relative error: {_fmt(report.nodes['relative_error_percent'])}%"
        )
        lines.append("")

    if report.time_gap is not None:
        lines.append("## Solving time")
        lines.append("")
        rows = [
            ("baseline", report.time_gap["mean_time_baseline"]),
            ("candidate", report.time_gap["mean_time_candidate"]),
        ]
        lines += _md_table(["set", "mean time (s)"], rows)
        lines.append("")
        lines.append(f"time gap: {_fmt(report.time_gap['gap_percent'])}%")
        lines.append("")

    if report.internal_features is not None:
        lines.append("## Solver-internal features")
        lines.append("")
        lines += _md_internal_block(report.internal_features, "baseline", "candidate")
        lines.append("")

    if report.tuning is not None:
        lines.append("## Tuning")
        lines.append("")
        rows = [
            ("default", report.tuning["default_mean_time"]),
            ("best", report.tuning["best_mean_time"]),
        ]
        lines += _md_table(["configuration", "tuning-set mean time (s)"], rows)
        lines.append("")
        lines.append(f"tuning-set improvement: {_fmt(report.tuning['improvement_percent'])}%")
        best = report.tuning["best_configuration"]
        lines.append(
            "best configuration: "
            + ", ".join(f"{k}={_fmt(best[k])}" for k in sorted(best))
        )
        if report.tuning.get("test_improvement_percent") is not None:
            lines.append(
                f"held-out means: default {_fmt(report.tuning['test_default_mean'])} s, "
                f"best {_fmt(report.tuning['test_best_mean'])} s, "
                f"improvement {_fmt(report.tuning['test_improvement_percent'])}%"
            )
        lines.append("")

    lines.append("## Diagnostics")
    lines.append("")
    lines += _md_table(
        ["stage", "status"], sorted(report.diagnostics.items())
    )
    lines.append("")
    return "\n".join(lines)


def _render_markdown_split_half(report):
    lines = ["# Split-half validation", ""]
    lines.append(f"- split seed: {report.seed}")
    lines.append(f"- half sizes: {report.size_a} / {report.size_b}")
    lines.append(f"- records without a usable root gap: {report.excluded}")
    lines.append("")
    lines += _md_internal_block(report.comparison, "half a", "half b")
    lines.append("")
    return "\n".join(lines)


def _internal_sample_columns(row):
    cells = {
        "root_gap_percent": row["root_gap_percent"],
        "heuristic_success_count": row["heuristic_success_count"],
    }
    for slot, count in zip(CUT_SLOTS, row["cut_vector"]):
        cells["cut_" + slot] = count
    return cells


def _render_csv(report):
    out = _stdio.StringIO()
    if isinstance(report, SplitHalfReport):
        cols = (
            ["set", "instance", "root_gap_percent", "heuristic_success_count"]
            + ["cut_" + s for s in CUT_SLOTS]
        )
        writer = csv.DictWriter(out, fieldnames=cols, lineterminator="\n")
        writer.writeheader()
        for half in ("a", "b"):
            for row in report.samples[half]:
                cells = {"set": half, "instance": row["instance"]}
                cells.update(_internal_sample_columns(row))
                writer.writerow(cells)
        return out.getvalue()

    struct = (report.structural or {}).get("samples") or {}
    internal = (report.internal_features or {}).get("samples") or {}
    cols = ["set", "instance"]
    if struct:
        cols += list(FEATURE_NAMES)
    if internal:
        cols += ["root_gap_percent", "heuristic_success_count"]
        cols += ["cut_" + s for s in CUT_SLOTS]
    writer = csv.DictWriter(out, fieldnames=cols, restval="", lineterminator="\n")
    writer.writeheader()
    for label in ("baseline", "candidate"):
        merged, order = {}, []
        for row in struct.get(label, ()):
            name = row["instance"]
            merged[name] = {"set": label, "instance": name}
            merged[name].update({k: row[k] for k in FEATURE_NAMES})
            order.append(name)
        for row in internal.get(label, ()):
            name = row["instance"]
            if name not in merged:
                merged[name] = {"set": label, "instance": name}
                order.append(name)
            merged[name].update(_internal_sample_columns(row))
        for name in order:
            writer.writerow(merged[name])
    return out.getvalue()


def render_report(report, format="json"):
    """Render a ComparisonReport or SplitHalfReport as text.

    `json` is the canonical schema with stable key order, `markdown` is
    the human summary, `csv` is a flat per-instance dump for plotting.
    """
    if format == "json":
        return report.to_json()
    if format == "markdown":
        if isinstance(report, SplitHalfReport):
            return _render_markdown_split_half(report)
        return _render_markdown_comparison(report)
    if format == "csv":
        return _render_csv(report)
    raise UnknownFormat(f"unknown report format {format!r}")
