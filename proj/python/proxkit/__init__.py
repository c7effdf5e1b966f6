from ._core import (
    Metric,
    SpatialTree,
    brute_nn,
    build_tree,
    cnns,
    comprehensive_nns,
    defeatist_nns,
    distance,
    emst,
    farthest_first,
    generate,
    greedy_tsp,
    knn_classify,
    lsh_query,
    phi,
    run_experiment,
)

__all__ = [
    "Metric",
    "SpatialTree",
    "brute_nn",
    "build_tree",
    "cnns",
    "comprehensive_nns",
    "defeatist_nns",
    "distance",
    "emst",
    "farthest_first",
    "generate",
    "greedy_tsp",
    "knn_classify",
    "lsh_query",
    "phi",
    "run_experiment",
]
