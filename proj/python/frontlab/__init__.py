"""Bistable fronts on metric graphs: propagation, blocking and invasion."""

from ._frontlab import (
    Bistable,
    Error,
    LimitProfile,
    MetricGraph,
    SolverParams,
    StarCriterion,
    WaveProfile,
    graph_from_json,
    limit_profile,
    make_cubic,
    make_table,
    neumann_eigenvalues,
    one_way_graph,
    partial_propagation_graph,
    perturbed_star,
    propagation_matrix,
    random_center_graph,
    run_scenario,
    scan_cubic_a,
    star_criterion,
    star_graph,
    traveling_wave,
    weighted_star_graph,
)

__all__ = [name for name in dir() if not name.startswith("_")]
