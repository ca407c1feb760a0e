from .modules.enumeration import GlobalOptimum, enumerate_radial_configs, global_optimum
from .modules.harness import ExperimentConfig, RunArchive, compare, emit_cdf_data, run_experiment, write_report
from .modules.metrics import (
    EmpiricalCdf,
    PerformanceReport,
    ReferenceCdf,
    SolutionSet,
    area_vs_reference,
    build_cdf,
    compare_sets,
    deterministic_dominance,
    first_order_dominates,
    opisd,
    perc,
    rank_solvers,
    reference_cdf_global,
    reference_cdf_relative,
    second_order_dominates,
)
from .modules.network import (
    Network,
    RadialConfiguration,
    branch_exchange,
    count_radial_configs,
    detect_loop,
    is_radial,
    load_network,
    parse_network,
    random_radial_config,
)
from .modules.powerflow import (
    OperationalLimits,
    PenaltySpec,
    penalized_objective,
    solve_power_flow,
    total_losses,
)
from .modules.solvers import ProblemHandle, collect_solutions, run_ga, run_pso, run_sa

__version__ = "1.0.0"

__all__ = [
    "EmpiricalCdf",
    "ExperimentConfig",
    "GlobalOptimum",
    "Network",
    "OperationalLimits",
    "PenaltySpec",
    "PerformanceReport",
    "ProblemHandle",
    "RadialConfiguration",
    "ReferenceCdf",
    "RunArchive",
    "SolutionSet",
    "area_vs_reference",
    "branch_exchange",
    "build_cdf",
    "collect_solutions",
    "compare",
    "compare_sets",
    "count_radial_configs",
    "detect_loop",
    "deterministic_dominance",
    "emit_cdf_data",
    "enumerate_radial_configs",
    "first_order_dominates",
    "global_optimum",
    "is_radial",
    "load_network",
    "opisd",
    "parse_network",
    "penalized_objective",
    "perc",
    "random_radial_config",
    "rank_solvers",
    "reference_cdf_global",
    "reference_cdf_relative",
    "run_experiment",
    "run_ga",
    "run_pso",
    "run_sa",
    "second_order_dominates",
    "solve_power_flow",
    "total_losses",
    "write_report",
]
