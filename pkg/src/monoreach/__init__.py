"""Monotone fan-in-2 circuits for directed reachability.

Builders for squaring, explicit affine-plane, and recursive composed
circuits; covering-family generation and checking; brute-force oracles;
and exact depth accounting.
"""

__version__ = "0.1.0"

from .build import (
    DepthLedger,
    RecursionSchedule,
    Stage,
    build_explicit,
    build_reach,
    build_reach_exact,
    build_reach_leq,
    build_recursive,
    build_walk_power,
    ceil_log2,
    compose_family,
    depth_ratio,
    predict_depth,
    recursion_schedule,
    trend_table,
)
from .circuit import (
    AND,
    OR,
    AdjacencyMatrix,
    MonotoneCircuit,
    WireMatrix,
    bool_matrix_product,
    circuit_from_text,
    circuit_to_text,
    input_matrix,
    new_circuit,
    or_tree,
    read_circuit,
    write_circuit,
)
from .errors import (
    BudgetExceededError,
    ConstructionFailedError,
    FamilyViolationError,
    InvalidParameterError,
    InvalidReferenceError,
    MonoreachError,
)
from .families import (
    AffinePlaneFamily,
    CoveringFamily,
    FamilyCounterexample,
    FamilyParams,
    HittingWitness,
    affine_lines,
    augment_with_terminals,
    check_family_exact,
    check_family_sampled,
    family_from_text,
    family_to_text,
    hitting_decomposition,
    line_cover_bound,
    minimal_deficiency,
    minimal_prime_q,
    plane_family,
    read_family,
    sample_family,
    sampling_failure_bound,
    sampling_guarantee_holds,
    sampling_log_failure_bound,
    verify_line_cover_bound,
    write_family,
)
from .oracles import (
    GraphSample,
    bfs_reachable,
    enumerate_graphs,
    exact_length_walk_exists,
    graph_from_text,
    graph_to_text,
    no_path_graph,
    planted_path_graph,
    random_graph,
    read_graph,
    run_exhaustive_check,
    run_planted_check,
    run_random_check,
    shortest_path_length,
    write_graph,
)
