from .problem import Evaluator, ProblemHandle, SolutionSample, adaptive_stop
from .sa import SaParams, acceptance_probability, c0_from_worsening, estimate_c0, run_sa
from .ga import GaParams, run_ga, selection_weights
from .pso import PsoParams, inertia_weight, run_pso
from .collect import collect_solutions, expand_grid, expand_values
