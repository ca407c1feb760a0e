import math
import time
from dataclasses import dataclass

from .. import config
from ..defs.meta import RunStatus
from ..defs.solvers import SolverDef
from ..defs.validators import validate_sa_params
from ..errors import DegenerateProblemError
from ..network import random_radial_config
from ..utils.log import log_debug
from ..utils.rng import make_rng
from .moves import has_exchange, random_exchange
from .problem import Evaluator, adaptive_stop, finish_sample


@dataclass(frozen=True)
class SaParams:
    alpha: float = 0.95
    n_w: int = 10
    p_0: float = 0.5
    m_a: int = 200
    m_c: int = 50
    n_s: int = config.DEFAULT_N_S
    threshold: float = config.DEFAULT_STOP_THRESHOLD

    def __post_init__(self):
        validate_sa_params(self)


def acceptance_probability(delta: float, c: float) -> float:
    if delta <= 0.0:
        return 1.0
    if c <= 0.0 or math.isinf(delta):
        return 0.0
    return math.exp(-delta / c)


def c0_from_worsening(mean_worsening: float, p_0: float) -> float:
    """c_0 such that the mean worsening is accepted with probability p_0."""
    return mean_worsening / math.log(1.0 / p_0)


def estimate_c0(problem, start, n_w, p_0, rng, evaluate=None) -> float:
    """Random exchanges from `start` until `n_w` worsening moves are seen; returns c_0."""
    if not 0.0 < p_0 < 1.0:
        raise ValueError("p_0 must lie in (0, 1)")
    net = problem.network
    evaluate = evaluate or Evaluator(problem)
    if not has_exchange(net, start):
        raise DegenerateProblemError("no branch exchange is possible from the start configuration")

    current, current_value = start, evaluate(start)
    worsenings = []
    limit = n_w * config.C0_MAX_ATTEMPTS_PER_WORSENING
    attempts = 0
    while len(worsenings) < n_w:
        if attempts >= limit:
            raise DegenerateProblemError(
                f"only {len(worsenings)} of {n_w} worsening moves found in {limit} exchanges"
            )
        attempts += 1
        candidate = random_exchange(net, current, rng)
        value = evaluate(candidate)
        if not math.isfinite(value):
            continue
        if math.isfinite(current_value) and value > current_value:
            worsenings.append(value - current_value)
        current, current_value = candidate, value

    c0 = c0_from_worsening(sum(worsenings) / len(worsenings), p_0)
    log_debug(f"c0 estimated at {c0:.6g} from {n_w} worsenings in {attempts} exchanges")
    return c0


def run_sa(problem, params: SaParams, seed: int):
    """Simulated annealing with geometric cooling c_m = alpha * c_(m-1).

    Each main iteration runs an internal cycle of random exchanges from the best configuration
    found so far, ending after m_a analyzed or m_c accepted configurations.
    """
    started = time.perf_counter()
    net = problem.network
    rng = make_rng(seed)
    evaluate = Evaluator(problem)

    current = random_radial_config(net, rng)
    best, best_value = current, evaluate(current)
    if not has_exchange(net, current):
        return finish_sample("SA", params, seed, best, best_value, evaluate, 0, started, RunStatus.DEGENERATE)

    try:
        c = estimate_c0(problem, current, params.n_w, params.p_0, rng, evaluate)
    except DegenerateProblemError as e:
        log_debug(f"SA falls back to pure descent: {e}")
        c = 0.0

    history = [best_value]
    iteration = 0
    for iteration in range(1, config.MAX_SOLVER_ITERATIONS + 1):
        current, current_value = best, best_value
        analyzed = accepted = 0
        while analyzed < params.m_a and accepted < params.m_c:
            candidate = random_exchange(net, current, rng)
            value = evaluate(candidate)
            analyzed += 1
            if value <= current_value or rng.random() < acceptance_probability(value - current_value, c):
                current, current_value = candidate, value
                accepted += 1
                if value < best_value:
                    best, best_value = candidate, value

        history.append(best_value)
        if adaptive_stop(history, params.n_s, params.threshold):
            break
        c *= params.alpha

    return finish_sample("SA", params, seed, best, best_value, evaluate, iteration, started, history=history)


SOLVERS = {
    "SA": SolverDef("SA", SaParams, run_sa, "Simulated Annealing"),
}
