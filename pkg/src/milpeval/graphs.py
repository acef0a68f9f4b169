"""Bipartite constraint-variable graphs and structural features.

An instance maps to an undirected bipartite graph: one node per
constraint (feature: its right-hand side), one node per variable
(9 features: objective coefficient, domain one-hot, finite-bound
indicators and values, degree normalized by the constraint count),
and an edge wherever the matrix has a nonzero, weighted by it.

Eleven structural features summarize the graph. Two of them
(clustering of the variable projection, greedy modularity) run on the
kernel backend picked at import: the compiled extension when present,
its pure-Python twin otherwise. Both produce bit-identical numbers;
set MILPEVAL_KERNELS=python to force the fallback.
"""

import os
from dataclasses import dataclass

import numpy as np

from .errors import EmptyGraph, NoEdges
from .instance import BINARY, CONTINUOUS, INTEGER


def _load_backend():
    choice = os.environ.get("MILPEVAL_KERNELS", "").strip().lower()
    if choice == "python":
        from . import _kernels_py as impl

        return impl
    try:
        from . import _kernels as impl
    except ImportError:
        from . import _kernels_py as impl
    return impl


_impl = _load_backend()


def kernel_backend():
    """Name of the active kernel backend: compiled or python."""
    return _impl.BACKEND


FEATURE_NAMES = (
    "coef_dens",
    "var_degree_mean",
    "var_degree_std",
    "cons_degree_mean",
    "cons_degree_std",
    "lhs_mean",
    "lhs_std",
    "rhs_mean",
    "rhs_std",
    "clustering",
    "modularity",
)

DEGREE_CAP = 1000
SAMPLE_PAIRS = 2000


@dataclass
class BipartiteGraph:
    constraint_features: np.ndarray  # (m, 1)
    variable_features: np.ndarray  # (n, 9)
    edge_rows: np.ndarray  # (nnz,) constraint index
    edge_cols: np.ndarray  # (nnz,) variable index
    edge_vals: np.ndarray  # (nnz,) coefficient

    @property
    def num_constraints(self):
        return self.constraint_features.shape[0]

    @property
    def num_variables(self):
        return self.variable_features.shape[0]

    @property
    def num_edges(self):
        return self.edge_rows.shape[0]


@dataclass
class StructuralFeatureVector:
    coef_dens: float
    var_degree_mean: float
    var_degree_std: float
    cons_degree_mean: float
    cons_degree_std: float
    lhs_mean: float
    lhs_std: float
    rhs_mean: float
    rhs_std: float
    clustering: float
    modularity: float

    def as_dict(self):
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    def as_array(self):
        return np.array([getattr(self, name) for name in FEATURE_NAMES], dtype=np.float64)


def to_bipartite(inst):
    """Bipartite graph view of an instance."""
    m, n = inst.num_rows, inst.num_cols
    cons_feat = inst.rhs.reshape(m, 1).astype(np.float64)

    degree = np.zeros(n, dtype=np.int64)
    np.add.at(degree, inst.cols, 1)
    dom = np.array(
        [
            (1.0 if d == BINARY else 0.0, 1.0 if d == INTEGER else 0.0, 1.0 if d == CONTINUOUS else 0.0)
            for d in inst.integrality
        ],
        dtype=np.float64,
    ).reshape(n, 3)
    has_lb = np.isfinite(inst.lower)
    has_ub = np.isfinite(inst.upper)
    var_feat = np.column_stack(
        [
            inst.objective,
            dom,
            has_lb.astype(np.float64),
            np.where(has_lb, inst.lower, 0.0),
            has_ub.astype(np.float64),
            np.where(has_ub, inst.upper, 0.0),
            degree / m if m > 0 else np.zeros(n),
        ]
    )
    return BipartiteGraph(
        constraint_features=cons_feat,
        variable_features=var_feat,
        edge_rows=inst.rows.copy(),
        edge_cols=inst.cols.copy(),
        edge_vals=inst.vals.copy(),
    )


def _constraint_csr(graph):
    """CSR of constraint -> variable membership. Edge arrays arrive
    sorted row-major from the canonical instance, which this relies on."""
    m = graph.num_constraints
    counts = np.zeros(m, dtype=np.int64)
    np.add.at(counts, graph.edge_rows, 1)
    ptr = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, graph.edge_cols.astype(np.int64)


def variable_projection_clustering(graph, seed=0):
    """Average local clustering of the variable projection.

    Two variables are adjacent when some constraint contains both.
    Constraints with more than DEGREE_CAP members contribute
    SAMPLE_PAIRS seeded random pairs instead of every pair. Nodes of
    projection degree below 2 contribute 0; an empty projection gives 0.
    """
    if graph.num_variables == 0:
        return 0.0
    ptr, idx = _constraint_csr(graph)
    return float(
        _impl.projection_clustering(ptr, idx, graph.num_variables, DEGREE_CAP, SAMPLE_PAIRS, seed)
    )


def _bipartite_csr(graph):
    """Symmetric CSR over m + n nodes (constraints first)."""
    m, n = graph.num_constraints, graph.num_variables
    heads = graph.edge_rows.astype(np.int64)
    tails = graph.edge_cols.astype(np.int64) + m
    src = np.concatenate([heads, tails])
    dst = np.concatenate([tails, heads])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    counts = np.zeros(m + n, dtype=np.int64)
    np.add.at(counts, src, 1)
    ptr = np.zeros(m + n + 1, dtype=np.int64)
    np.cumsum(counts, out=ptr[1:])
    return ptr, dst


def graph_modularity(graph, seed=0, resolution=1.0):
    """Modularity of a greedy (multi-level local move) partition of the
    bipartite graph, at the given resolution. Raises NoEdges when the
    graph has no edges, where the quantity is undefined."""
    if graph.num_edges == 0:
        raise NoEdges("modularity needs at least one edge")
    ptr, idx = _bipartite_csr(graph)
    labels = _impl.louvain_labels(ptr, idx, graph.num_constraints + graph.num_variables, seed, resolution)
    return partition_modularity(graph, labels)


def partition_modularity(graph, labels):
    """Newman modularity of an explicit partition of the bipartite graph.

    Q = sum over communities of L_c/E - (D_c / 2E)^2 with L_c the
    intra-community edge count, D_c the total degree and E the edge
    count. Unweighted. Label arrays may use arbitrary ints.
    """
    if graph.num_edges == 0:
        raise NoEdges("modularity needs at least one edge")
    m = graph.num_constraints
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape[0] != m + graph.num_variables:
        raise ValueError("label array must cover every node")

    uniq, node_comm = np.unique(labels, return_inverse=True)
    n_comm = uniq.shape[0]
    edge_a = node_comm[graph.edge_rows]
    edge_b = node_comm[graph.edge_cols + m]

    intra = np.zeros(n_comm, dtype=np.int64)
    same = edge_a == edge_b
    np.add.at(intra, edge_a[same], 1)

    deg = np.zeros(m + graph.num_variables, dtype=np.int64)
    np.add.at(deg, graph.edge_rows, 1)
    np.add.at(deg, graph.edge_cols + m, 1)
    dsum = np.zeros(n_comm, dtype=np.int64)
    np.add.at(dsum, node_comm, deg)

    e = float(graph.num_edges)
    two_e = 2.0 * e
    q = 0.0
    for c in range(n_comm):
        t = dsum[c] / two_e
        q += intra[c] / e - t * t
    return q


def extract_features(graph, seed=0):
    """The 11 structural features of a nonempty bipartite graph."""
    m, n = graph.num_constraints, graph.num_variables
    if m == 0 or n == 0:
        raise EmptyGraph(f"graph has {m} constraints and {n} variables")
    if graph.num_edges == 0:
        raise NoEdges("structural features need at least one edge")

    var_deg = np.zeros(n, dtype=np.int64)
    np.add.at(var_deg, graph.edge_cols, 1)
    cons_deg = np.zeros(m, dtype=np.int64)
    np.add.at(cons_deg, graph.edge_rows, 1)
    coefs = graph.edge_vals
    rhs = graph.constraint_features[:, 0]

    return StructuralFeatureVector(
        coef_dens=graph.num_edges / (m * n),
        var_degree_mean=float(np.mean(var_deg)),
        var_degree_std=float(np.std(var_deg)),
        cons_degree_mean=float(np.mean(cons_deg)),
        cons_degree_std=float(np.std(cons_deg)),
        lhs_mean=float(np.mean(coefs)),
        lhs_std=float(np.std(coefs)),
        rhs_mean=float(np.mean(rhs)),
        rhs_std=float(np.std(rhs)),
        clustering=variable_projection_clustering(graph, seed=seed),
        modularity=graph_modularity(graph, seed=seed),
    )
