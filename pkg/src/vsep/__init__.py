"""Multilevel vertex separator solver driven by bilinear refinement."""

from .cbp import (
    CbpInstance,
    DegenerateRepairError,
    DimensionMismatchError,
    InfeasibleBoundsError,
    MonotonicityError,
    NotBinaryError,
    NotOrthogonalError,
    Partition,
    Point,
    escape,
    extract_partition,
    feasible,
    instance_from_graph,
    objective,
    partition_violations,
    refine,
    round_to_binary,
    solve_block_lp,
)
from .graphs import (
    AsymmetryError,
    Graph,
    ParseError,
    load_matrix_market,
    load_metis,
    save_metis,
    validate,
)
from .multilevel import (
    Hierarchy,
    InfeasibleError,
    Level,
    LevelTrace,
    Matching,
    SolveParams,
    ascending_degree_order,
    build_hierarchy,
    contract,
    heavy_edge_matching,
    prolong,
    random_order,
    solve,
    solve_coarsest,
)
from .oracle import OracleResult, TooLargeError, brute_force_lp, brute_force_vsp

__version__ = "0.1.0"

__all__ = [
    "AsymmetryError",
    "CbpInstance",
    "DegenerateRepairError",
    "DimensionMismatchError",
    "Graph",
    "Hierarchy",
    "InfeasibleBoundsError",
    "InfeasibleError",
    "Level",
    "LevelTrace",
    "Matching",
    "MonotonicityError",
    "NotBinaryError",
    "NotOrthogonalError",
    "OracleResult",
    "ParseError",
    "Partition",
    "Point",
    "SolveParams",
    "TooLargeError",
    "ascending_degree_order",
    "brute_force_lp",
    "brute_force_vsp",
    "build_hierarchy",
    "contract",
    "escape",
    "extract_partition",
    "feasible",
    "heavy_edge_matching",
    "instance_from_graph",
    "load_matrix_market",
    "load_metis",
    "objective",
    "partition_violations",
    "prolong",
    "random_order",
    "refine",
    "round_to_binary",
    "save_metis",
    "solve",
    "solve_block_lp",
    "solve_coarsest",
    "validate",
]
