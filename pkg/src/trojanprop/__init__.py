"""Trojan propagation in undirected online social networks.

Per-node probability model, matching Monte Carlo simulator, graph
statistics and the presets used to compare the two.
"""

from .graph import (
    EdgeListError,
    Graph,
    GraphStats,
    clustering_coefficient,
    generate_synthetic,
    graph_stats,
    load_edge_list,
    save_edge_list,
)
from .metrics import CorrelationResult, UndefinedCorrelation, pearson, series_discrepancy
from .model import (
    AvSchedule,
    NodeParams,
    StateDistribution,
    TimeSeries,
    alpha,
    beta,
    gamma,
    run_model,
    step,
    visit_indicator,
)
from .simulator import RunConfig, replay, run_simulation
from .experiments import PRESETS, ExperimentSpec, preset, run_experiment, sweep

__version__ = "0.1.0"

__all__ = [
    "AvSchedule",
    "CorrelationResult",
    "EdgeListError",
    "ExperimentSpec",
    "Graph",
    "GraphStats",
    "NodeParams",
    "PRESETS",
    "RunConfig",
    "StateDistribution",
    "TimeSeries",
    "UndefinedCorrelation",
    "alpha",
    "beta",
    "clustering_coefficient",
    "gamma",
    "generate_synthetic",
    "graph_stats",
    "load_edge_list",
    "pearson",
    "preset",
    "replay",
    "run_experiment",
    "run_model",
    "run_simulation",
    "save_edge_list",
    "series_discrepancy",
    "step",
    "sweep",
    "visit_indicator",
]
