"""milpeval: solver-agnostic evaluation toolkit for generated MILP
instance sets.

Build instances (four generator families), exchange them as free MPS,
view them as bipartite graphs with structural features, solve them
through external solver processes, mine solver logs for internal
behavior (root gap, heuristic successes, cut usage), and compare
instance sets with distribution metrics (JSD similarity, W1 distances,
cut-vector PCA). A resumable pipeline and a CLI tie the stages
together.
"""

__version__ = "0.1.0"

from .errors import MilpEvalError
from .instance import MilpInstance, InstanceStats, instance_stats, make_instance
from .io import parse_instance, read_instance, write_instance
from .mps import parse_mps, write_mps
from .lpfile import parse_lp
from .graphs import (
    BipartiteGraph,
    StructuralFeatureVector,
    extract_features,
    graph_modularity,
    kernel_backend,
    partition_modularity,
    to_bipartite,
    variable_projection_clustering,
)
from .stats import (
    CutVectorComparison,
    PcaModel,
    SimilarityReport,
    compare_cut_vectors,
    jsd_similarity,
    pca_fit,
    structural_similarity,
    wasserstein1,
)
from .generators import FAMILIES, GenParams, default_params, generate_batch, generate_instance
from .harness import (
    FeasibilityReport,
    HardnessReport,
    SolveRecord,
    SolverConfig,
    branching_node_report,
    feasibility_ratio,
    hardness_report,
    load_records,
    run_set,
    run_solver,
    solving_time_gap,
)
from .adapters import STATUSES, get_adapter
from .logparse import (
    CUT_SLOTS,
    SolverInternalFeatures,
    cut_matrix,
    extract_run_features,
    load_features,
    parse_solver_log,
)
from .tuner import (
    Dimension,
    ParameterSpace,
    TuningResult,
    default_space,
    evaluate_config,
    evaluate_generalization,
    improvement_percent,
    load_presets,
    load_space,
    tune,
)
from .pipeline import (
    BenchmarkConfig,
    ComparisonReport,
    SplitHalfReport,
    internal_comparison,
    render_report,
    run_benchmark,
    split_half,
)

__all__ = [
    "MilpEvalError",
    "MilpInstance",
    "InstanceStats",
    "instance_stats",
    "make_instance",
    "parse_instance",
    "read_instance",
    "write_instance",
    "parse_mps",
    "write_mps",
    "parse_lp",
    "BipartiteGraph",
    "StructuralFeatureVector",
    "extract_features",
    "graph_modularity",
    "kernel_backend",
    "partition_modularity",
    "to_bipartite",
    "variable_projection_clustering",
    "CutVectorComparison",
    "PcaModel",
    "SimilarityReport",
    "compare_cut_vectors",
    "jsd_similarity",
    "pca_fit",
    "structural_similarity",
    "wasserstein1",
    "FAMILIES",
    "GenParams",
    "default_params",
    "generate_batch",
    "generate_instance",
    "FeasibilityReport",
    "HardnessReport",
    "SolveRecord",
    "SolverConfig",
    "branching_node_report",
    "feasibility_ratio",
    "hardness_report",
    "load_records",
    "run_set",
    "run_solver",
    "solving_time_gap",
    "STATUSES",
    "get_adapter",
    "CUT_SLOTS",
    "SolverInternalFeatures",
    "cut_matrix",
    "extract_run_features",
    "load_features",
    "parse_solver_log",
    "Dimension",
    "ParameterSpace",
    "TuningResult",
    "default_space",
    "evaluate_config",
    "evaluate_generalization",
    "improvement_percent",
    "load_presets",
    "load_space",
    "tune",
    "BenchmarkConfig",
    "ComparisonReport",
    "SplitHalfReport",
    "internal_comparison",
    "render_report",
    "run_benchmark",
    "split_half",
    "__version__",
]
