"""Monte Carlo simulator for cached-content delivery over direct and relayed
routes, with joint route selection and transmit-power scheduling."""

from .config import ConfigError, SimConfig, db_to_linear, dbm_to_watts
from .channel import (NoiseModel, blockage_matrix, count_blockages, fspl_db,
                      gain_matrix, link_rate, path_gain, segment_blocked)
from .content import (Catalog, build_catalog, caching_probabilities,
                      place_caches, sample_requests, zipf_popularity)
from .scenario import (GBS_ID, NODE_GBS, NODE_UAV, NODE_UE, Building, NodeSet,
                       Scenario, build_scenario, generate_buildings, kmeans_xy,
                       place_nodes)
from .routing import (Route, RouteSet, build_route_set, enumerate_routes,
                      prune_routes, relay_pool, source_options)
from .schedule import (AssignmentError, Evaluator, JobSpec, PowerPolicy,
                       Timeline, check_conservation, evaluate, hop_duration,
                       simulate_jobs, sum_duration)
from .algorithms import (BruteForceBudgetError, GreedyTrace, benchmark_select,
                         brute_force_select, greedy_select, multihop_gain)
from .experiment import (ALGORITHMS, DEFAULT_ALGOS, CampaignResult, DropResult,
                         cdf_at, compute_cdf, drop_seed, load_manifest,
                         mean_gain_pct, policy_for, run_campaign, run_drop,
                         sweep, write_outputs)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "AssignmentError", "BruteForceBudgetError", "Building",
    "CampaignResult", "Catalog", "ConfigError", "DEFAULT_ALGOS", "DropResult",
    "Evaluator", "GBS_ID", "GreedyTrace", "JobSpec", "NODE_GBS", "NODE_UAV",
    "NODE_UE", "NodeSet", "NoiseModel", "PowerPolicy", "Route", "RouteSet",
    "Scenario", "SimConfig", "Timeline", "benchmark_select", "blockage_matrix",
    "brute_force_select", "build_catalog", "build_route_set", "build_scenario",
    "caching_probabilities", "cdf_at", "check_conservation", "compute_cdf", "drop_seed",
    "count_blockages", "db_to_linear", "dbm_to_watts", "enumerate_routes",
    "evaluate", "fspl_db", "gain_matrix", "generate_buildings", "greedy_select",
    "hop_duration", "kmeans_xy", "link_rate", "load_manifest", "mean_gain_pct",
    "multihop_gain", "path_gain", "place_caches", "place_nodes", "policy_for",
    "prune_routes", "relay_pool", "run_campaign", "run_drop", "sample_requests",
    "segment_blocked", "simulate_jobs", "source_options", "sum_duration",
    "sweep", "write_outputs", "zipf_popularity",
]
