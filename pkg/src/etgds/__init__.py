"""Dynamic-threshold graph dynamical systems.

Vertex states carry an activity bit plus a per-vertex threshold that moves
when the bit flips; this package simulates the resulting sequential and
synchronous dynamics, enumerates whole phase spaces with attractor
classification, and counts the common fixed-point set exactly by several
independent methods (sweep, backtracking, closed forms, transfer matrix,
tree path-decomposition).
"""

from .dynamics import (
    ExtendedState,
    OrbitCapExceeded,
    Parallel,
    Rule,
    RuleScheme,
    Sequential,
    SymmetricWeights,
    TransitionDirection,
    closed_neighborhood_weights,
    format_state,
    gca_step,
    is_unidirectional,
    local_update,
    next_threshold,
    orbit,
    parse_state,
    potential,
    psi,
    sds_step,
    sigma,
    step_function,
    tau,
    weighted_mixed_gca_step,
)
from .graphs import (
    Graph,
    closed_neighborhood,
    cycle_graph,
    enumerate_connected_graphs,
    from_edge_list,
    is_connected,
    is_cycle,
    is_path,
    is_tree,
    load_graph,
    path_graph,
    random_tree,
    star_graph,
)
from .phasespace import (
    AttractorSummary,
    CheckReport,
    PhaseSpace,
    StateCodec,
    StateSpaceCapExceeded,
    attractors,
    build_phase_space,
    state_space_size,
    to_dot,
    to_json,
    verify_conjugacy,
    verify_limit_theorem,
    verify_potential_descent,
    verify_unidirectional,
)
from .fixedpoints import (
    PathDecomposition,
    TransferMatrix,
    build_transfer_matrix,
    chi_path,
    count_fixed_backtrack,
    count_fixed_brute,
    count_fixed_cycle,
    count_fixed_cycle_recursion,
    count_fixed_cycle_transfer,
    count_fixed_path,
    count_fixed_tree,
    decompose_tree,
    fib,
    is_fixed_point,
    lucas,
    merge_at_vertex,
    path_recursion_step,
    path_scaling_estimate,
    transfer_trace_range,
    verify_fixed_point_sets,
    verify_half_ones,
    zeta_path,
)

__all__ = [name for name in dir() if not name.startswith("_")]
