import math
from dataclasses import replace

import numpy as np
import pytest

from milpeval.errors import EmptyGraph, NoEdges
from milpeval.generators import GenParams, generate_instance
from milpeval.graphs import (
    DEGREE_CAP,
    FEATURE_NAMES,
    extract_features,
    graph_modularity,
    kernel_backend,
    partition_modularity,
    to_bipartite,
    variable_projection_clustering,
)
from milpeval.instance import make_instance


def cover_instance(rows, cols, m, n, rhs=None):
    # <= rows of ones, binary columns; enough structure for graph tests.
    return make_instance(
        name="t",
        minimize=True,
        objective=np.ones(n),
        rows=rows,
        cols=cols,
        vals=np.ones(len(rows)),
        senses=["<="] * m,
        rhs=np.ones(m) if rhs is None else rhs,
        lower=np.zeros(n),
        upper=np.ones(n),
        integrality=["binary"] * n,
    )


def brute_clustering(inst):
    # O(n^3) local clustering of the variable projection.
    adj = [set() for _ in range(inst.num_cols)]
    members = {}
    for r, c in zip(inst.rows, inst.cols):
        members.setdefault(int(r), []).append(int(c))
    for group in members.values():
        for i in group:
            for j in group:
                if i != j:
                    adj[i].add(j)
    total = 0.0
    for v in range(inst.num_cols):
        neigh = sorted(adj[v])
        d = len(neigh)
        if d < 2:
            continue
        links = sum(
            1
            for i in range(d)
            for j in range(i + 1, d)
            if neigh[j] in adj[neigh[i]]
        )
        total += 2.0 * links / (d * (d - 1))
    return total / inst.num_cols


def brute_modularity(inst, labels):
    m = inst.num_rows
    e = inst.nnz
    same = sum(
        1 for r, c in zip(inst.rows, inst.cols) if labels[int(r)] == labels[m + int(c)]
    )
    deg = [0] * (m + inst.num_cols)
    for r, c in zip(inst.rows, inst.cols):
        deg[int(r)] += 1
        deg[m + int(c)] += 1
    dsum = {}
    for node, lab in enumerate(labels):
        dsum[lab] = dsum.get(lab, 0) + deg[node]
    return same / e - sum((d / (2.0 * e)) ** 2 for d in dsum.values())


def small_corpus():
    out = []
    for family, seed in (("sc", 5), ("ca", 6), ("is", 7), ("cfl", 8)):
        params = replace(
            default_small(family),
            seed=seed,
        )
        out.append(generate_instance(params)[0])
    return out


def default_small(family):
    sizes = {
        "sc": dict(constraints_range=(8, 14), variables_range=(15, 25), density_range=(0.15, 0.3)),
        "ca": dict(constraints_range=(8, 14), variables_range=(15, 25), density_range=(0.15, 0.3)),
        "is": dict(variables_range=(14, 20), density_range=(0.15, 0.3)),
        "cfl": dict(constraints_range=(4, 7)),
    }
    return GenParams(family=family, **sizes[family])


def test_clustering_triangle_is_one():
    inst = cover_instance([0, 0, 0], [0, 1, 2], m=1, n=3)
    assert variable_projection_clustering(to_bipartite(inst)) == 1.0


def test_clustering_disjoint_pairs_is_zero():
    inst = cover_instance([0, 0, 1, 1], [0, 1, 2, 3], m=2, n=4)
    assert variable_projection_clustering(to_bipartite(inst)) == 0.0


def test_clustering_mixed_hand_case():
    # Triangle {0,1,2} plus pendant edge {2,3}: node 2 closes 1 of 3
    # neighbor pairs, node 3 has degree 1.
    inst = cover_instance([0, 0, 0, 1, 1], [0, 1, 2, 2, 3], m=2, n=4)
    got = variable_projection_clustering(to_bipartite(inst))
    assert abs(got - 7.0 / 12.0) < 1e-12


def test_clustering_matches_brute_force_on_corpus():
    for inst in small_corpus():
        got = variable_projection_clustering(to_bipartite(inst))
        assert abs(got - brute_clustering(inst)) < 1e-12


def test_clustering_capped_constraint_sampled_deterministically():
    # One constraint above DEGREE_CAP members switches to sampled pair
    # insertion; the estimate is seeded, bounded, and backend-agnostic.
    from milpeval import _kernels_py
    from milpeval.graphs import _constraint_csr

    n = DEGREE_CAP + 1
    inst = cover_instance([0] * n, list(range(n)), m=1, n=n)
    graph = to_bipartite(inst)
    got = variable_projection_clustering(graph)
    assert 0.0 <= got <= 1.0
    assert variable_projection_clustering(graph) == got
    ptr, idx = _constraint_csr(graph)
    assert _kernels_py.projection_clustering(ptr, idx, n, DEGREE_CAP, 2000, 0) == got


def test_partition_modularity_two_components():
    inst = cover_instance([0, 1], [0, 1], m=2, n=2)
    graph = to_bipartite(inst)
    # Constraint nodes come first: communities {c0,v0} and {c1,v1}.
    assert partition_modularity(graph, [0, 1, 0, 1]) == 0.5
    assert partition_modularity(graph, [0, 0, 0, 0]) == 0.0


def test_partition_modularity_matches_brute_force():
    rng = np.random.default_rng(11)
    for inst in small_corpus():
        size = inst.num_rows + inst.num_cols
        graph = to_bipartite(inst)
        for _ in range(3):
            labels = rng.integers(0, 4, size=size)
            got = partition_modularity(graph, labels)
            assert abs(got - brute_modularity(inst, list(labels))) < 1e-12


def test_partition_modularity_label_permutation_invariant():
    inst = small_corpus()[0]
    graph = to_bipartite(inst)
    rng = np.random.default_rng(13)
    labels = rng.integers(0, 5, size=inst.num_rows + inst.num_cols)
    base = partition_modularity(graph, labels)
    for _ in range(20):
        perm = rng.permutation(5)
        assert abs(partition_modularity(graph, perm[labels]) - base) < 1e-12


def test_partition_modularity_validation():
    inst = cover_instance([0], [0], m=1, n=1)
    with pytest.raises(ValueError):
        partition_modularity(to_bipartite(inst), [0])
    empty = cover_instance([], [], m=1, n=1)
    with pytest.raises(NoEdges):
        partition_modularity(to_bipartite(empty), [0, 0])


def test_graph_modularity_requires_edges():
    empty = cover_instance([], [], m=1, n=1)
    with pytest.raises(NoEdges):
        graph_modularity(to_bipartite(empty))


def test_graph_modularity_is_deterministic_and_bounded():
    inst = small_corpus()[0]
    graph = to_bipartite(inst)
    q1 = graph_modularity(graph, seed=0)
    q2 = graph_modularity(graph, seed=0)
    assert q1 == q2
    assert -0.5 <= q1 <= 1.0


def test_extract_features_hand_case():
    # Path: c0 covers {x0, x1}, c1 covers {x1, x2}.
    inst = cover_instance([0, 0, 1, 1], [0, 1, 1, 2], m=2, n=3)
    f = extract_features(to_bipartite(inst))
    assert f.coef_dens == 4 / 6
    assert abs(f.var_degree_mean - 4.0 / 3.0) < 1e-12
    assert abs(f.var_degree_std - math.sqrt(2.0) / 3.0) < 1e-12
    assert f.cons_degree_mean == 2.0
    assert f.cons_degree_std == 0.0
    assert f.lhs_mean == 1.0
    assert f.lhs_std == 0.0
    assert f.rhs_mean == 1.0
    assert f.rhs_std == 0.0
    assert f.clustering == 0.0
    assert -0.5 <= f.modularity <= 1.0


def test_extract_features_coef_dens_exact_on_corpus():
    for inst in small_corpus():
        f = extract_features(to_bipartite(inst))
        assert f.coef_dens == inst.nnz / (inst.num_rows * inst.num_cols)
        prod = f.coef_dens * inst.num_rows * inst.num_cols
        assert round(prod) == inst.nnz
        assert abs(prod - inst.nnz) < 1e-6


def test_extract_features_validation():
    no_vars = make_instance(
        name="t",
        minimize=True,
        objective=[],
        rows=[],
        cols=[],
        vals=[],
        senses=["<="],
        rhs=[1.0],
        lower=[],
        upper=[],
        integrality=[],
    )
    with pytest.raises(EmptyGraph):
        extract_features(to_bipartite(no_vars))
    empty = cover_instance([], [], m=1, n=1)
    with pytest.raises(NoEdges):
        extract_features(to_bipartite(empty))


def test_feature_names_frozen():
    assert FEATURE_NAMES == (
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


def test_feature_vector_array_matches_dict():
    inst = small_corpus()[0]
    f = extract_features(to_bipartite(inst))
    arr = f.as_array()
    d = f.as_dict()
    assert [d[name] for name in FEATURE_NAMES] == list(arr)


def test_kernel_backends_agree():
    from milpeval import _kernels_py
    from milpeval.graphs import _bipartite_csr, _constraint_csr

    try:
        from milpeval import _kernels
    except ImportError:
        pytest.skip("compiled backend not built")
    assert kernel_backend() in ("compiled", "python")
    for inst in small_corpus():
        graph = to_bipartite(inst)
        ptr, idx = _constraint_csr(graph)
        n = graph.num_variables
        a = _kernels.projection_clustering(ptr, idx, n, 1000, 2000, 0)
        b = _kernels_py.projection_clustering(ptr, idx, n, 1000, 2000, 0)
        assert a == b
        bptr, bidx = _bipartite_csr(graph)
        total = graph.num_constraints + n
        la = _kernels.louvain_labels(bptr, bidx, total, 0, 1.0)
        lb = _kernels_py.louvain_labels(bptr, bidx, total, 0, 1.0)
        assert np.array_equal(la, lb)
