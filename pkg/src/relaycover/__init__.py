"""Joint relay-chain positioning and area coverage for UAV swarms.

A planning library plus a deterministic round-based simulator: a master UAV
patrols by node count while the rest of the swarm forms a relay chain back
to the base station, with a tunable coverage term that lets the chain itself
help cover the map.
"""

from .config import (
    CommConfig,
    ConfigError,
    MapConfig,
    RandomObstacles,
    ScenarioConfig,
    config_from_dict,
    config_to_dict,
    dumps_config,
    load_config,
    save_config,
)
from .coverage import (
    VisitCounts,
    coverage_cost,
    hybrid_edge_cost,
    node_count_step,
    record_visit,
    total_cost,
)
from .graph import (
    NavGraph,
    NodeId,
    Position,
    Rect,
    build_grid_graph,
    comm_cost,
    comm_reachable,
    nav_graph_from_parts,
)
from .metrics import (
    ExperimentSummary,
    RoundRecord,
    comm_stats,
    coverage_targets,
    iterations_to_k_coverage,
    summarize,
    visit_stats,
    write_round_table,
    write_summary,
    write_visit_grid,
)
from .relay import (
    FAIL_ITERATION_CAP,
    FAIL_NO_IMPROVING_EDGE,
    FAIL_UNREACHABLE,
    Chain,
    DualAscentResult,
    DualAscentState,
    MlmcTree,
    chain_cost,
    dual_ascent_chain,
    mlmc_tree,
)
from .runner import RunResult, realize_obstacles, run_experiment, run_single
from .sim import (
    CHAIN,
    DEPARTED,
    DETACHED,
    MASTER,
    EventDirective,
    Simulation,
    SwarmState,
    TargetSpec,
    TargetState,
    Uav,
    assign_chain_positions,
    detach_uav,
    make_swarm,
    promote_master,
    reintegrate_uav,
    remove_uav,
    run_round,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
