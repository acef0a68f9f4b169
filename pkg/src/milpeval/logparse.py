"""Solver-internal feature extraction from raw logs.

Three text-only parsers (Gurobi, SCIP, HiGHS) pull the same three
signals out of a solve log: the duality gap at the end of the root
node, how many incumbents primal heuristics produced, and which cut
families the solver applied. Logs may be truncated mid-solve; parsers
fill what they can and flag the rest in diagnostics instead of failing.

Cut usage lands in a fixed 12-slot vector so sets solved by different
solvers stay comparable. Per-solver spellings live in data files, so a
new solver release is a data edit, not a code edit.
"""

import json
import math
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from typing import Dict, List, Optional

from .errors import UnrecognizedLog

CUT_SLOTS = (
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
_SLOT_INDEX = {name: i for i, name in enumerate(CUT_SLOTS)}

# HiGHS marks each incumbent with the code of the component that found
# it. These codes are heuristic-type finders; branching (B), node
# evaluation (T), plain LP solves (S), unboundedness (U) and the empty
# MIP shortcut (P) are not.
HIGHS_HEURISTIC_SOURCES = frozenset("CFHLRzlup")


def _load_name_map(solver_id):
    path = resources.files("milpeval").joinpath(f"data/cut_names_{solver_id}.json")
    with path.open() as fh:
        return json.load(fh)


@dataclass
class SolverInternalFeatures:
    solver_id: str
    solver_version: Optional[str]
    root_gap_percent: Optional[float]
    root_gap_grel_percent: Optional[float]
    heuristic_success_count: int
    cut_vector: List[int]
    diagnostics: Dict[str, object] = field(default_factory=dict)
    instance: Optional[str] = None

    def to_json(self):
        return json.dumps(
            {
                "instance": self.instance,
                "solver_id": self.solver_id,
                "solver_version": self.solver_version,
                "root_gap_percent": self.root_gap_percent,
                "root_gap_grel_percent": self.root_gap_grel_percent,
                "heuristic_success_count": self.heuristic_success_count,
                "cut_vector": self.cut_vector,
                "diagnostics": self.diagnostics,
            },
            sort_keys=True,
        )

    @staticmethod
    def from_json(line):
        doc = json.loads(line)
        return SolverInternalFeatures(
            solver_id=doc["solver_id"],
            solver_version=doc.get("solver_version"),
            root_gap_percent=doc.get("root_gap_percent"),
            root_gap_grel_percent=doc.get("root_gap_grel_percent"),
            heuristic_success_count=doc["heuristic_success_count"],
            cut_vector=list(doc["cut_vector"]),
            diagnostics=doc.get("diagnostics", {}),
            instance=doc.get("instance"),
        )


def _grel_percent(z_inc, z_bound):
    return 100.0 * abs(z_inc - z_bound) / max(1.0, abs(z_inc))


def _to_float(token):
    try:
        v = float(token)
    except (TypeError, ValueError):
        return None
    if not math.isfinite(v) or abs(v) >= 1e30:
        return None
    return v


def _percent(token):
    if token is None or not token.endswith("%"):
        return None
    return _to_float(token[:-1])


class _Diag:
    def __init__(self):
        self.lines_matched = 0
        self.fields_missing = []
        self.unknown_cuts = {}
        self.notes = []

    def as_dict(self):
        out = {"lines_matched": self.lines_matched, "fields_missing": self.fields_missing}
        if self.unknown_cuts:
            out["unknown_cuts"] = self.unknown_cuts
        if self.notes:
            out["notes"] = self.notes
        return out


# -- Gurobi ----------------------------------------------------------------

_GUROBI_BANNER = re.compile(r"Gurobi Optimizer version (\S+)")
_GUROBI_FOUND_HEUR = re.compile(r"^Found heuristic solution: objective ")
_GUROBI_CUT_LINE = re.compile(r"^  ([A-Za-z][A-Za-z -]*?): (\d+)\s*$")
_GUROBI_FINAL = re.compile(r"Best objective (\S+), best bound (\S+), gap (\S+)")
_GUROBI_EXPLORED = re.compile(r"^Explored (\d+) nodes?", re.MULTILINE)


def _gurobi_node_row(line):
    """Split one node-table row into (marker, Expl, incumbent, bound, gap).

    Rows read right-to-left: time, It/Node, Gap, BestBd, Incumbent; the
    left edge is an optional marker letter plus Expl/Unexpl counts.
    """
    marker = None
    body = line
    if line[:1].isalpha() or line[:1] == "*":
        marker = line[0]
        body = line[1:]
    tokens = body.split()
    if len(tokens) < 7:
        return None
    if not re.fullmatch(r"\d+s", tokens[-1]):
        return None
    try:
        expl = int(tokens[0])
        int(tokens[1])
    except ValueError:
        return None
    gap = tokens[-3]
    bound = _to_float(tokens[-4])
    incumbent = _to_float(tokens[-5])
    return marker, expl, incumbent, bound, gap


def parse_gurobi_log(text):
    m = _GUROBI_BANNER.search(text)
    if m is None:
        raise UnrecognizedLog("no Gurobi banner in log")
    version = m.group(1)
    diag = _Diag()
    name_map = _load_name_map("gurobi")

    heuristics = 0
    root_row = None
    cut_vector = [0] * len(CUT_SLOTS)
    in_cut_block = False
    for line in text.splitlines():
        if _GUROBI_FOUND_HEUR.match(line):
            heuristics += 1
            diag.lines_matched += 1
            continue
        if line.startswith("Cutting planes:"):
            in_cut_block = True
            diag.lines_matched += 1
            continue
        if in_cut_block:
            cm = _GUROBI_CUT_LINE.match(line)
            if cm is None:
                in_cut_block = False
            else:
                diag.lines_matched += 1
                label, count = cm.group(1), int(cm.group(2))
                slot = name_map.get(label)
                if slot is None:
                    diag.unknown_cuts[label] = diag.unknown_cuts.get(label, 0) + count
                else:
                    cut_vector[_SLOT_INDEX[slot]] += count
                continue
        row = _gurobi_node_row(line)
        if row is None:
            continue
        diag.lines_matched += 1
        marker, expl, incumbent, bound, gap = row
        if marker == "H":
            heuristics += 1
        if expl == 0 and incumbent is not None and bound is not None and gap.endswith("%"):
            root_row = (incumbent, bound, gap)

    # A solve that closes at the root ends root processing with the final
    # gap, whatever the last mid-root row said.
    root_gap = None
    root_grel = None
    closed = None
    if re.search(r"^Optimal solution found", text, re.MULTILINE):
        fm = _GUROBI_FINAL.search(text)
        em = None
        for em in _GUROBI_EXPLORED.finditer(text):
            pass
        if fm is not None and em is not None and int(em.group(1)) <= 1:
            incumbent = _to_float(fm.group(1))
            bound = _to_float(fm.group(2))
            gap = _percent(fm.group(3))
            if incumbent is not None and bound is not None and gap is not None:
                closed = (incumbent, bound, gap)
    if closed is not None:
        diag.lines_matched += 1
        incumbent, bound, root_gap = closed
        root_grel = _grel_percent(incumbent, bound)
    elif root_row is not None:
        incumbent, bound, gap = root_row
        root_gap = _percent(gap)
        root_grel = _grel_percent(incumbent, bound)
    if root_gap is None:
        diag.fields_missing.append("root_gap")
        diag.notes.append("no root-node incumbent/bound pair observed")

    return SolverInternalFeatures(
        solver_id="gurobi",
        solver_version=version,
        root_gap_percent=root_gap,
        root_gap_grel_percent=root_grel,
        heuristic_success_count=heuristics,
        cut_vector=cut_vector,
        diagnostics=diag.as_dict(),
    )


# -- SCIP ------------------------------------------------------------------

_SCIP_BANNER = re.compile(r"SCIP version (\S+)")
_SCIP_STATUS = re.compile(r"^SCIP Status\s*:\s*(.+)$", re.MULTILINE)
_SCIP_NODES = re.compile(r"^Solving Nodes\s*:\s*(\d+)", re.MULTILINE)
_SCIP_FINAL_GAP = re.compile(r"^Gap\s*:\s*([0-9.eE+-]+)\s*%", re.MULTILINE)
_SCIP_SEP_HEADER = re.compile(r"^Separators\s*:")


def _scip_table_indices(header_cells):
    wanted = {"node": None, "dualbound": None, "primalbound": None, "gap": None}
    for i, cell in enumerate(header_cells):
        key = cell.strip().lower()
        if key in wanted and wanted[key] is None:
            wanted[key] = i
    if any(v is None for v in wanted.values()):
        return None
    return wanted


def parse_scip_log(text):
    m = _SCIP_BANNER.search(text)
    if m is None:
        raise UnrecognizedLog("no SCIP banner in log")
    version = m.group(1)
    diag = _Diag()
    name_map = _load_name_map("scip")

    heuristics = 0
    root_row = None
    indices = None
    lines = text.splitlines()
    for line in lines:
        if "|" not in line:
            continue
        cells = line.split("|")
        if len(cells) < 6:
            continue
        if "node" in line and "bound" in line:
            got = _scip_table_indices(cells)
            if got is not None:
                indices = got
                diag.lines_matched += 1
            continue
        if indices is None or len(cells) <= max(indices.values()):
            continue
        try:
            node = int(cells[indices["node"]].strip())
        except ValueError:
            continue
        diag.lines_matched += 1
        marker = line.lstrip()[:1]
        if marker.isalpha():
            heuristics += 1
        primal = _to_float(cells[indices["primalbound"]].strip())
        dual = _to_float(cells[indices["dualbound"]].strip())
        gap = cells[indices["gap"]].strip()
        if node == 1 and primal is not None and dual is not None and gap.endswith("%"):
            root_row = (primal, dual, gap)

    cut_vector = [0] * len(CUT_SLOTS)
    in_sep = False
    applied_idx = None
    for line in lines:
        hm = _SCIP_SEP_HEADER.match(line)
        if hm is not None:
            # Column layout varies across releases; trust the header.
            header_fields = line.split(":", 1)[1].split()
            applied_idx = header_fields.index("Applied") if "Applied" in header_fields else None
            in_sep = applied_idx is not None
            if in_sep:
                diag.lines_matched += 1
            continue
        if in_sep:
            sm = re.match(r"^  (\S[^:]*?)\s*:\s*(.*)$", line)
            if sm is None:
                in_sep = False
                continue
            diag.lines_matched += 1
            sep_name = sm.group(1)
            fields = sm.group(2).split()
            if len(fields) <= applied_idx or sep_name == "cut pool":
                continue
            try:
                applied = int(fields[applied_idx])
            except ValueError:
                continue
            if applied <= 0:
                continue
            slot = name_map.get(sep_name)
            if slot is None:
                diag.unknown_cuts[sep_name] = diag.unknown_cuts.get(sep_name, 0) + applied
            else:
                cut_vector[_SLOT_INDEX[slot]] += applied

    root_gap = None
    root_grel = None
    closed = False
    sm = _SCIP_STATUS.search(text)
    nm = _SCIP_NODES.search(text)
    gm = _SCIP_FINAL_GAP.search(text)
    if (
        sm is not None
        and "optimal" in sm.group(1)
        and nm is not None
        and int(nm.group(1)) <= 1
        and gm is not None
    ):
        # Solved at the root: root processing ended with the final gap.
        diag.lines_matched += 1
        root_gap = _to_float(gm.group(1))
        closed = root_gap is not None
        pm = re.search(r"^Primal Bound\s*:\s*([0-9.eE+-]+)", text, re.MULTILINE)
        dm = re.search(r"^Dual Bound\s*:\s*([0-9.eE+-]+)", text, re.MULTILINE)
        if pm and dm:
            primal = _to_float(pm.group(1))
            dual = _to_float(dm.group(1))
            if primal is not None and dual is not None:
                root_grel = _grel_percent(primal, dual)
    if not closed and root_row is not None:
        primal, dual, gap = root_row
        root_gap = _percent(gap)
        root_grel = _grel_percent(primal, dual)
    if root_gap is None:
        diag.fields_missing.append("root_gap")
        diag.notes.append("no root-node incumbent/bound pair observed")

    return SolverInternalFeatures(
        solver_id="scip",
        solver_version=version,
        root_gap_percent=root_gap,
        root_gap_grel_percent=root_grel,
        heuristic_success_count=heuristics,
        cut_vector=cut_vector,
        diagnostics=diag.as_dict(),
    )


# -- HiGHS -----------------------------------------------------------------

_HIGHS_BANNER = re.compile(r"Running HiGHS (\S+)")
_HIGHS_REPORT_GAP = re.compile(r"^  Gap\s+(\S+)", re.MULTILINE)
_HIGHS_REPORT_NODES = re.compile(r"^  Nodes\s+(\d+)", re.MULTILINE)
_HIGHS_REPORT_STATUS = re.compile(r"^  Status\s+(.+?)\s*$", re.MULTILINE)
_HIGHS_REPORT_PRIMAL = re.compile(r"^  Primal bound\s+(\S+)", re.MULTILINE)
_HIGHS_REPORT_DUAL = re.compile(r"^  Dual bound\s+(\S+)", re.MULTILINE)


def _highs_node_row(line):
    """Split a B&B table row into (src, proc, bound, sol, gap, cuts, confl).

    Columns: Src Proc InQueue Leaves Expl% BestBound BestSol Gap Cuts
    InLp Confl LpIters Time; Src is empty on plain progress rows.
    """
    stripped = line.strip()
    if not stripped or stripped[0] not in "0123456789" and not stripped[0].isalpha():
        return None
    src = ""
    body = stripped
    while body and body[0].isalpha():
        src += body[0]
        body = body[1:]
    if src and not body[:1].isspace():
        return None
    tokens = body.split()
    if len(tokens) != 12:
        return None
    if not tokens[11].endswith("s") or not tokens[3].endswith("%"):
        return None
    try:
        proc = int(tokens[0])
        int(tokens[1])
        cuts = int(tokens[7])
        confl = int(tokens[9])
    except ValueError:
        return None
    return src, proc, tokens[4], tokens[5], tokens[6], cuts, confl


def parse_highs_log(text):
    m = _HIGHS_BANNER.search(text)
    if m is None:
        raise UnrecognizedLog("no HiGHS banner in log")
    version = m.group(1)
    diag = _Diag()

    heuristics = 0
    root_row = None
    confl_peak = 0
    pool_peak = 0
    for line in text.splitlines():
        row = _highs_node_row(line)
        if row is None:
            continue
        diag.lines_matched += 1
        src, proc, bound_tok, sol_tok, gap_tok, cuts, confl = row
        if any(ch in HIGHS_HEURISTIC_SOURCES for ch in src):
            heuristics += 1
        confl_peak = max(confl_peak, confl)
        pool_peak = max(pool_peak, cuts)
        sol = _to_float(sol_tok)
        bound = _to_float(bound_tok)
        if proc == 0 and sol is not None and bound is not None and gap_tok.endswith("%"):
            root_row = (sol, bound, gap_tok)

    # HiGHS logs carry no per-family cut table; conflict constraints are
    # the one attributable family, the rest of the pool is recorded as a
    # diagnostic rather than guessed into slots.
    cut_vector = [0] * len(CUT_SLOTS)
    cut_vector[_SLOT_INDEX["inf_proof"]] = confl_peak
    diag.notes.append("cut pool peak %d not attributable to cut families" % pool_peak)

    root_gap = None
    root_grel = None
    closed = False
    sm = _HIGHS_REPORT_STATUS.search(text)
    nm = _HIGHS_REPORT_NODES.search(text)
    gm = _HIGHS_REPORT_GAP.search(text)
    if (
        sm is not None
        and sm.group(1) == "Optimal"
        and nm is not None
        and int(nm.group(1)) <= 1
        and gm is not None
    ):
        # Solved at the root: root processing ended with the final gap.
        diag.lines_matched += 1
        root_gap = _percent(gm.group(1)) if gm.group(1).endswith("%") else _to_float(gm.group(1))
        closed = root_gap is not None
        pm = _HIGHS_REPORT_PRIMAL.search(text)
        dm = _HIGHS_REPORT_DUAL.search(text)
        if pm and dm:
            sol = _to_float(pm.group(1))
            bound = _to_float(dm.group(1))
            if sol is not None and bound is not None:
                root_grel = _grel_percent(sol, bound)
    if not closed and root_row is not None:
        sol, bound, gap_tok = root_row
        root_gap = _percent(gap_tok)
        root_grel = _grel_percent(sol, bound)
    if root_gap is None:
        diag.fields_missing.append("root_gap")
        diag.notes.append("no root-node incumbent/bound pair observed")

    return SolverInternalFeatures(
        solver_id="highs",
        solver_version=version,
        root_gap_percent=root_gap,
        root_gap_grel_percent=root_grel,
        heuristic_success_count=heuristics,
        cut_vector=cut_vector,
        diagnostics=diag.as_dict(),
    )


# -- Shared entry points ----------------------------------------------------

_PARSERS = {
    "gurobi": parse_gurobi_log,
    "scip": parse_scip_log,
    "highs": parse_highs_log,
}


def parse_solver_log(text, solver_id):
    try:
        parser = _PARSERS[solver_id]
    except KeyError:
        raise UnrecognizedLog(f"no parser for solver id {solver_id!r}")
    return parser(text)


def cut_matrix(features):
    """Stack cut vectors into an (n, 12) array for the stats layer."""
    import numpy as np

    return np.array([f.cut_vector for f in features], dtype=np.float64)


def extract_run_features(run_dir, solver_id, out_path=None):
    """Parse every log under run_dir/logs into features.jsonl.

    Returns the features in instance-name order. out_path defaults to
    run_dir/features.jsonl.
    """
    log_dir = os.path.join(run_dir, "logs")
    names = sorted(f for f in os.listdir(log_dir) if f.endswith(".log"))
    feats = []
    for fname in names:
        with open(os.path.join(log_dir, fname), errors="replace") as fh:
            feat = parse_solver_log(fh.read(), solver_id)
        feat.instance = fname[: -len(".log")]
        feats.append(feat)
    if out_path is None:
        out_path = os.path.join(run_dir, "features.jsonl")
    with open(out_path, "w") as fh:
        for feat in feats:
            fh.write(feat.to_json() + "\n")
    return feats


def load_features(path):
    feats = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                feats.append(SolverInternalFeatures.from_json(line))
    return feats
