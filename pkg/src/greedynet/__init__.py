"""Network creation games where agents route greedily through a metric space."""
from .equilibria import (
    ExactLimitExceeded,
    KernelMismatch,
    approx_factor,
    best_response_exact,
    best_response_greedy,
    complete_graph_profile,
    count_greedy_equilibria,
    is_greedy_equilibrium,
    is_nash_equilibrium,
)
from .game import (
    StrategyProfile,
    ZPolicy,
    agent_cost,
    build_network,
    greedy_distance,
    social_cost,
    stretch,
)
from .metric import (
    MetricError,
    MetricSpace,
    StructureError,
    metric_closure,
    metric_from_matrix,
    metric_from_one_two,
    metric_from_points,
    metric_from_tree,
    validate_metric,
)

__version__ = "0.1.0"
