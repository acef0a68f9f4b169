"""Synthetic baseline instance families.

Four classic families keep the pipeline self-contained: set cover,
independent set, combinatorial auction, capacitated facility location.
Every instance is feasible and bounded by construction, and generation
is a pure function of (family, params, seed).
"""

import dataclasses
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from ._seeds import derive_seed
from .errors import InvalidConfig
from .instance import BINARY, CONTINUOUS, MilpInstance, make_instance
from .mps import write_mps

FAMILY_SET_COVER = "sc"
FAMILY_COMB_AUCTION = "ca"
FAMILY_FACILITY_LOCATION = "cfl"
FAMILY_INDEPENDENT_SET = "is"
FAMILIES = (
    FAMILY_SET_COVER,
    FAMILY_COMB_AUCTION,
    FAMILY_FACILITY_LOCATION,
    FAMILY_INDEPENDENT_SET,
)

# Default sampling ranges per family, inclusive on both ends.
_DEFAULT_RANGES = {
    FAMILY_SET_COVER: {
        "constraints_range": (200, 800),
        "variables_range": (400, 1600),
        "density_range": (0.05, 0.2),
    },
    FAMILY_COMB_AUCTION: {
        "constraints_range": (50, 200),
        "variables_range": (80, 600),
        "density_range": (0.02, 0.1),
    },
    FAMILY_FACILITY_LOCATION: {
        "constraints_range": (50, 150),
        "variables_range": (500, 5000),
        "density_range": (0.01, 0.3),
    },
    FAMILY_INDEPENDENT_SET: {
        "constraints_range": (480, 520),
        "variables_range": (480, 520),
        "density_range": (0.01, 0.015),
    },
}

GENERATOR_VERSION = 1

# Cost/demand ranges the size table leaves open; fixed here so instances
# stay bounded and human-readable.
COST_RANGE = (1, 100)
CFL_DEMAND_RANGE = (5, 35)
CFL_FIXED_COST_RANGE = (100, 1000)
CFL_RAW_CAPACITY_RANGE = (10, 160)
CFL_CAPACITY_SLACK = 1.2
CFL_FACILITY_RATIO = 0.5
IS_MAX_REDRAWS = 10


@dataclass(frozen=True)
class GenParams:
    """Sampling ranges and the seed for one generated instance.

    constraints_range drives rows (SC), items (CA), customers (CFL) and
    is unused for IS; variables_range drives columns (SC), bids (CA),
    node count (IS) and is recorded but unused for CFL; density_range
    doubles as the IS edge probability range and is recorded but unused
    for CFL.
    """

    family: str
    seed: int = 0
    constraints_range: tuple = None
    variables_range: tuple = None
    density_range: tuple = None
    value_range: tuple = COST_RANGE
    facility_ratio: float = CFL_FACILITY_RATIO

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidConfig(f"unknown problem family {self.family!r}")
        defaults = _DEFAULT_RANGES[self.family]
        for key in ("constraints_range", "variables_range", "density_range"):
            if getattr(self, key) is None:
                object.__setattr__(self, key, defaults[key])
        for key in ("constraints_range", "variables_range"):
            lo, hi = getattr(self, key)
            if not (0 < lo <= hi):
                raise InvalidConfig(f"{key} must satisfy 0 < lo <= hi, got {(lo, hi)}")
        lo, hi = self.density_range
        if not (0.0 < lo <= hi <= 1.0):
            raise InvalidConfig(f"density_range must lie in (0, 1], got {(lo, hi)}")
        lo, hi = self.value_range
        if not (0 < lo <= hi):
            raise InvalidConfig(f"value_range must satisfy 0 < lo <= hi, got {(lo, hi)}")
        if not (0.0 < self.facility_ratio <= 1.0):
            raise InvalidConfig(f"facility_ratio must lie in (0, 1], got {self.facility_ratio}")


def default_params(family, seed=0):
    """Table defaults for one family."""
    return GenParams(family=family, seed=seed)


def _int_between(rng, lo_hi):
    lo, hi = lo_hi
    return int(rng.integers(lo, hi + 1))


def _uniform_between(rng, lo_hi):
    lo, hi = lo_hi
    return float(rng.uniform(lo, hi))


def generate_set_cover(params):
    """Random set-cover instance: min c'x s.t. Ax >= 1, x binary.

    Each column covers ceil(density*m) distinct rows; a repair pass
    flips one random column entry per otherwise-uncovered row.
    """
    rng = np.random.default_rng(params.seed)
    m = _int_between(rng, params.constraints_range)
    n = _int_between(rng, params.variables_range)
    density = _uniform_between(rng, params.density_range)
    costs = rng.integers(params.value_range[0], params.value_range[1] + 1, size=n)

    per_col = min(m, int(math.ceil(density * m)))
    rows = []
    cols = []
    covered = np.zeros(m, dtype=bool)
    for j in range(n):
        picks = rng.choice(m, size=per_col, replace=False)
        picks.sort()
        rows.append(picks)
        cols.append(np.full(per_col, j, dtype=np.int64))
        covered[picks] = True
    for i in np.flatnonzero(~covered):
        j = int(rng.integers(0, n))
        rows.append(np.array([i], dtype=np.int64))
        cols.append(np.array([j], dtype=np.int64))
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)

    inst = make_instance(
        name="",
        minimize=True,
        objective=costs.astype(np.float64),
        rows=rows,
        cols=cols,
        vals=np.ones(len(rows)),
        senses=[">="] * m,
        rhs=np.ones(m),
        lower=np.zeros(n),
        upper=np.ones(n),
        integrality=[BINARY] * n,
    )
    meta = {"rows": m, "columns": n, "density": density}
    return inst, meta


def generate_independent_set(params):
    """Random maximum independent set on an Erdos-Renyi graph.

    One binary variable per node, one x_u + x_v <= 1 row per edge,
    maximize the number of chosen nodes. A draw with zero edges is
    redrawn a few times, then accepted as an unconstrained instance.
    """
    rng = np.random.default_rng(params.seed)
    n = _int_between(rng, params.variables_range)
    p = _uniform_between(rng, params.density_range)

    iu, ju = np.triu_indices(n, k=1)
    for _ in range(IS_MAX_REDRAWS + 1):
        mask = rng.random(len(iu)) < p
        if mask.any() or len(iu) == 0:
            break
    eu = iu[mask]
    ev = ju[mask]
    num_edges = len(eu)

    rows = np.repeat(np.arange(num_edges, dtype=np.int64), 2)
    cols = np.empty(2 * num_edges, dtype=np.int64)
    cols[0::2] = eu
    cols[1::2] = ev

    inst = make_instance(
        name="",
        minimize=False,
        objective=np.ones(n),
        rows=rows,
        cols=cols,
        vals=np.ones(2 * num_edges),
        senses=["<="] * num_edges,
        rhs=np.ones(num_edges),
        lower=np.zeros(n),
        upper=np.ones(n),
        integrality=[BINARY] * n,
    )
    meta = {"nodes": n, "edge_probability": p, "edges": num_edges}
    return inst, meta


def generate_combinatorial_auction(params):
    """Random combinatorial auction: maximize accepted bid value.

    Each bid asks for a uniform random item subset of one fixed size;
    each item sells at most once. Items no bid mentions get no row.
    """
    rng = np.random.default_rng(params.seed)
    items = _int_between(rng, params.constraints_range)
    bids = _int_between(rng, params.variables_range)
    density = _uniform_between(rng, params.density_range)
    values = rng.integers(params.value_range[0], params.value_range[1] + 1, size=bids)

    bid_size = min(items, max(1, round(density * items)))
    item_rows = [[] for _ in range(items)]
    for b in range(bids):
        picks = rng.choice(items, size=bid_size, replace=False)
        for it in picks:
            item_rows[it].append(b)

    rows = []
    cols = []
    row_count = 0
    for it in range(items):
        if not item_rows[it]:
            continue
        for b in item_rows[it]:
            rows.append(row_count)
            cols.append(b)
        row_count += 1

    inst = make_instance(
        name="",
        minimize=False,
        objective=values.astype(np.float64),
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.ones(len(rows)),
        senses=["<="] * row_count,
        rhs=np.ones(row_count),
        lower=np.zeros(bids),
        upper=np.ones(bids),
        integrality=[BINARY] * bids,
    )
    meta = {"items": items, "bids": bids, "density": density, "bid_size": bid_size}
    return inst, meta


def generate_cfl(params):
    """Capacitated facility location with splittable assignment.

    Binary open decisions x_j, continuous assignment fractions y_ij.
    Customers must be fully assigned, facility load cannot exceed
    capacity when open, and y_ij <= x_j keeps closed facilities empty.
    Total capacity is scaled up to a fixed margin over total demand, so
    opening everything is always feasible.
    """
    rng = np.random.default_rng(params.seed)
    customers = _int_between(rng, params.constraints_range)
    facilities = int(math.ceil(params.facility_ratio * customers))
    demands = rng.integers(CFL_DEMAND_RANGE[0], CFL_DEMAND_RANGE[1] + 1, size=customers)
    raw_caps = rng.integers(
        CFL_RAW_CAPACITY_RANGE[0], CFL_RAW_CAPACITY_RANGE[1] + 1, size=facilities
    )
    scale = max(1.0, CFL_CAPACITY_SLACK * demands.sum() / raw_caps.sum())
    caps = raw_caps * scale
    fixed = rng.integers(CFL_FIXED_COST_RANGE[0], CFL_FIXED_COST_RANGE[1] + 1, size=facilities)
    transport = rng.uniform(COST_RANGE[0], COST_RANGE[1], size=(customers, facilities))

    # Columns: x_0..x_{F-1}, then y_ij grouped by customer.
    def ycol(i, j):
        return facilities + i * facilities + j

    n = facilities + customers * facilities
    objective = np.concatenate([fixed.astype(np.float64), transport.ravel()])

    rows = []
    cols = []
    vals = []
    senses = []
    rhs = []

    row = 0
    for i in range(customers):
        for j in range(facilities):
            rows.append(row)
            cols.append(ycol(i, j))
            vals.append(1.0)
        senses.append("=")
        rhs.append(1.0)
        row += 1
    for j in range(facilities):
        for i in range(customers):
            rows.append(row)
            cols.append(ycol(i, j))
            vals.append(float(demands[i]))
        rows.append(row)
        cols.append(j)
        vals.append(-float(caps[j]))
        senses.append("<=")
        rhs.append(0.0)
        row += 1
    for i in range(customers):
        for j in range(facilities):
            rows.append(row)
            cols.append(ycol(i, j))
            vals.append(1.0)
            rows.append(row)
            cols.append(j)
            vals.append(-1.0)
            senses.append("<=")
            rhs.append(0.0)
            row += 1

    lower = np.zeros(n)
    upper = np.ones(n)
    integrality = [BINARY] * facilities + [CONTINUOUS] * (customers * facilities)

    inst = make_instance(
        name="",
        minimize=True,
        objective=objective,
        rows=np.asarray(rows, dtype=np.int64),
        cols=np.asarray(cols, dtype=np.int64),
        vals=np.asarray(vals),
        senses=senses,
        rhs=np.asarray(rhs),
        lower=lower,
        upper=upper,
        integrality=integrality,
    )
    meta = {"customers": customers, "facilities": facilities}
    return inst, meta


_GENERATORS = {
    FAMILY_SET_COVER: generate_set_cover,
    FAMILY_INDEPENDENT_SET: generate_independent_set,
    FAMILY_COMB_AUCTION: generate_combinatorial_auction,
    FAMILY_FACILITY_LOCATION: generate_cfl,
}

_PROVENANCE = {
    FAMILY_SET_COVER: "uniform random coverage with repair pass",
    FAMILY_INDEPENDENT_SET: "erdos-renyi graph, one row per edge",
    FAMILY_COMB_AUCTION: "uniform item subsets, single-sale items",
    FAMILY_FACILITY_LOCATION: "splittable assignment, linked open decisions",
}


def generate_instance(params):
    """Dispatch to the family generator; returns (instance, sampled meta)."""
    inst, meta = _GENERATORS[params.family](params)
    return inst, meta


def generate_batch(family, count, root_seed, out_dir, params=None):
    """Write `count` instances plus gen_meta.json under out_dir.

    Per-instance seeds derive from (root_seed, index) so any slice of
    the batch can be regenerated independently. Returns the list of
    written MPS paths.
    """
    if count < 1:
        raise InvalidConfig(f"count must be >= 1, got {count}")
    base = params if params is not None else default_params(family)
    if base.family != family:
        raise InvalidConfig(f"params are for family {base.family!r}, not {family!r}")
    os.makedirs(out_dir, exist_ok=True)

    paths = []
    entries = []
    for index in range(count):
        seed = derive_seed(root_seed, index)
        inst, meta = generate_instance(dataclasses.replace(base, seed=seed))
        name = f"{family}_{index}"
        inst.name = name
        path = os.path.join(out_dir, name + ".mps")
        with open(path, "w") as fh:
            fh.write(write_mps(inst))
        paths.append(path)
        entries.append({"name": name, "seed": seed, "sampled": meta})
    meta_doc = {
        "family": family,
        "generator_version": GENERATOR_VERSION,
        "provenance": _PROVENANCE[family],
        "root_seed": int(root_seed),
        "count": count,
        "ranges": {
            "constraints_range": list(base.constraints_range),
            "variables_range": list(base.variables_range),
            "density_range": list(base.density_range),
            "value_range": list(base.value_range),
            "facility_ratio": base.facility_ratio,
        },
        "instances": entries,
    }
    with open(os.path.join(out_dir, "gen_meta.json"), "w") as fh:
        json.dump(meta_doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths
