import math
import time
from dataclasses import dataclass

import numpy as np

from .. import config
from ..defs.meta import RunStatus
from ..defs.solvers import SolverDef
from ..defs.validators import validate_pso_params
from ..network import random_radial_config
from ..utils.rng import make_rng
from .moves import exchangeable_ids, has_exchange, move_towards, open_only_in, random_exchange
from .problem import Evaluator, adaptive_stop, finish_sample


@dataclass(frozen=True)
class PsoParams:
    c_pso: int = 100
    w_init: float = 0.9
    w_final: float = 0.4
    n_s: int = config.DEFAULT_N_S
    threshold: float = config.DEFAULT_STOP_THRESHOLD
    m_est: int = config.PSO_ITERATION_ESTIMATE

    def __post_init__(self):
        validate_pso_params(self)


def inertia_weight(m: int, w_init: float, w_final: float, m_est: int = config.PSO_ITERATION_ESTIMATE) -> float:
    """Exponentially decaying inertia, w(0) = w_init and w -> w_final."""
    return w_final + (w_init - w_final) * math.exp(-4.0 * m / m_est)


def _move_particle(net, position, local_best, global_best, w, rng):
    # inertia: random exchanges
    for _ in range(int(round(w * len(exchangeable_ids(net, position))))):
        moved = random_exchange(net, position, rng)
        if moved is None:
            break
        position = moved
    # memory, then cooperation
    for target in (local_best, global_best):
        n_moves = int(round((1.0 - w) * len(open_only_in(net, position, target))))
        position = move_towards(net, position, target, n_moves, rng)
    return position


def run_pso(problem, params: PsoParams, seed: int):
    """Discrete PSO: particles move by branch exchanges driven by inertia, memory and cooperation.

    Move counts per term are round(w * A) random exchanges, then round((1 - w) * d) exchanges
    towards the local and the global best, d being the number of open branches that differ.
    """
    started = time.perf_counter()
    net = problem.network
    rng = make_rng(seed)
    evaluate = Evaluator(problem)

    positions = [random_radial_config(net, rng) for _ in range(params.c_pso)]
    values = [evaluate(cfg) for cfg in positions]
    local_best, local_values = list(positions), list(values)
    best_idx = int(np.argmin(values))
    best, best_value = positions[best_idx], values[best_idx]
    if not has_exchange(net, best):
        return finish_sample("PSO", params, seed, best, best_value, evaluate, 0, started, RunStatus.DEGENERATE)

    history = [best_value]
    iteration = 0
    for iteration in range(1, config.MAX_SOLVER_ITERATIONS + 1):
        w = inertia_weight(iteration - 1, params.w_init, params.w_final, params.m_est)
        for k in range(params.c_pso):
            moved = _move_particle(net, positions[k], local_best[k], best, w, rng)
            if moved == positions[k]:
                continue
            value = evaluate(moved)
            if not math.isfinite(value):
                continue
            positions[k], values[k] = moved, value
            if value < local_values[k]:
                local_best[k], local_values[k] = moved, value
                if value < best_value:
                    best, best_value = moved, value

        history.append(best_value)
        if adaptive_stop(history, params.n_s, params.threshold):
            break

    return finish_sample("PSO", params, seed, best, best_value, evaluate, iteration, started, history=history)


SOLVERS = {
    "PSO": SolverDef("PSO", PsoParams, run_pso, "Particle Swarm Optimization"),
}
