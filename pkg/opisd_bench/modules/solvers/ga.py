import math
import time
from dataclasses import dataclass

import numpy as np

from .. import config
from ..defs.meta import RunStatus
from ..defs.solvers import SolverDef
from ..defs.validators import validate_ga_params
from ..network import random_radial_config
from ..utils.rng import make_rng
from .moves import crossover, has_exchange, mutate
from .problem import Evaluator, adaptive_stop, finish_sample


@dataclass(frozen=True)
class GaParams:
    c_ga: int = 100
    p_c: float = 0.4
    p_m: float = 0.001
    n_s: int = config.DEFAULT_N_S
    threshold: float = config.DEFAULT_STOP_THRESHOLD

    def __post_init__(self):
        validate_ga_params(self)


def selection_weights(values) -> np.ndarray:
    """Roulette weights for minimization: (f_worst - f_p + eps) normalized over the population.

    Infeasible individuals get weight 0; a population with no positive weight is drawn uniformly.
    """
    values = np.asarray(values, dtype=float)
    finite = np.isfinite(values)
    weights = np.zeros(len(values))
    if finite.any():
        worst = values[finite].max()
        weights[finite] = worst - values[finite] + config.GA_FITNESS_EPS
    total = weights.sum()
    if total <= 0.0:
        return np.full(len(values), 1.0 / len(values))
    return weights / total


def run_ga(problem, params: GaParams, seed: int):
    """Generational GA on open-branch gene strings with one elite per generation.

    Crossover and mutation are built from branch exchanges, so every individual stays radial.
    A child whose evaluation is infeasible is replaced by its first parent.
    """
    started = time.perf_counter()
    net = problem.network
    rng = make_rng(seed)
    evaluate = Evaluator(problem)

    population = [random_radial_config(net, rng) for _ in range(params.c_ga)]
    values = [evaluate(cfg) for cfg in population]
    best_idx = int(np.argmin(values))
    best, best_value = population[best_idx], values[best_idx]
    if not has_exchange(net, best):
        return finish_sample("GA", params, seed, best, best_value, evaluate, 0, started, RunStatus.DEGENERATE)

    history = [best_value]
    generation = 0
    for generation in range(1, config.MAX_SOLVER_ITERATIONS + 1):
        weights = selection_weights(values)
        elite = int(np.argmin(values))
        offspring, offspring_values = [population[elite]], [values[elite]]

        while len(offspring) < params.c_ga:
            first, second = rng.choice(len(population), size=2, p=weights)
            parent = population[first]
            child = parent
            if rng.random() < params.p_c:
                child = crossover(net, parent, population[second], rng)
            child = mutate(net, child, params.p_m, rng)

            if child == parent:
                child_value = values[first]
            else:
                child_value = evaluate(child)
                if not math.isfinite(child_value):
                    child, child_value = parent, values[first]
            offspring.append(child)
            offspring_values.append(child_value)

        population, values = offspring, offspring_values
        gen_best = int(np.argmin(values))
        if values[gen_best] < best_value:
            best, best_value = population[gen_best], values[gen_best]

        history.append(best_value)
        if adaptive_stop(history, params.n_s, params.threshold):
            break

    return finish_sample("GA", params, seed, best, best_value, evaluate, generation, started, history=history)


SOLVERS = {
    "GA": SolverDef("GA", GaParams, run_ga, "Genetic Algorithm"),
}
