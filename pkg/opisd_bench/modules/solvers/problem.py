import math
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .. import config
from ..network import Network, RadialConfiguration
from ..powerflow import (
    Infeasible,
    OperationalLimits,
    PenaltySpec,
    PowerFlowOptions,
    penalized_objective,
)
from ..defs.formatters import format_params
from ..defs.meta import RunStatus


@dataclass(eq=False)
class ProblemHandle:
    """A network plus everything needed to evaluate f_p on its radial configurations.

    Objective values are memoized per handle; infeasible configurations evaluate to +inf so
    that no solver can keep or accept them.
    """

    network: Network
    limits: OperationalLimits
    penalties: PenaltySpec = field(default_factory=PenaltySpec)
    pf_options: PowerFlowOptions = field(default_factory=PowerFlowOptions)
    cache_size: int = config.OBJECTIVE_CACHE_SIZE

    def __post_init__(self):
        self._cache = OrderedDict()
        self._cache_lock = threading.Lock()

    @classmethod
    def from_network(cls, net: Network, limits=None, penalties=None, pf_options=None) -> "ProblemHandle":
        return cls(
            network=net,
            limits=limits or OperationalLimits.from_network(net),
            penalties=penalties or PenaltySpec(),
            pf_options=pf_options or PowerFlowOptions(),
        )

    def evaluate(self, cfg: RadialConfiguration):
        """Uncached f_p, or Infeasible."""
        return penalized_objective(self.network, cfg, self.limits, self.penalties, self.pf_options)

    def objective(self, cfg: RadialConfiguration) -> float:
        key = cfg.open_ids
        with self._cache_lock:
            if key in self._cache:
                self._cache.move_to_end(key)
                return self._cache[key]

        value = self.evaluate(cfg)
        value = math.inf if isinstance(value, Infeasible) else float(value)

        with self._cache_lock:
            if len(self._cache) >= self.cache_size:
                self._cache.popitem(last=False)  # Remove oldest item
            self._cache[key] = value
        return value

    def __getstate__(self):
        state = self.__dict__.copy()
        del state["_cache"]
        del state["_cache_lock"]
        return state

    def __setstate__(self, state):
        self.__dict__.update(state)
        self.__post_init__()


class Evaluator:
    """Counts the objective calls of one solver run."""

    def __init__(self, problem: ProblemHandle):
        self.problem = problem
        self.evaluations = 0

    def __call__(self, cfg: RadialConfiguration) -> float:
        self.evaluations += 1
        return self.problem.objective(cfg)


@dataclass(frozen=True)
class SolutionSample:
    solver: str
    param_cell: str
    seed: int
    best_config: Optional[RadialConfiguration]
    best_value: float
    evaluations: int
    iterations: int
    wall_time: float
    status: RunStatus = RunStatus.OK
    run_index: int = 0
    # starting best, then the best after each main iteration
    best_history: tuple = ()


def adaptive_stop(best_history: Sequence[float], n_s: int, threshold: float = config.DEFAULT_STOP_THRESHOLD) -> bool:
    """True when the best value improved by less than `threshold` across the last `n_s` entries.

    With threshold 0 the criterion is strict: stop only when the best value did not change.
    """
    if n_s < 1 or threshold < 0:
        raise ValueError("adaptive stop needs n_s >= 1 and threshold >= 0")
    if len(best_history) < n_s:
        return False
    # the window spans n_s iterations, so it starts one entry before the last n_s
    window = best_history[-n_s - 1:] if len(best_history) > n_s else best_history[-n_s:]
    improvement = 0.0 if window[0] == window[-1] else window[0] - window[-1]
    return improvement <= 0.0 or improvement < threshold


def finish_sample(solver, params, seed, best, best_value, evaluator, iterations, started, status=None, history=()):
    if status is None:
        status = RunStatus.OK if math.isfinite(best_value) else RunStatus.INFEASIBLE
    return SolutionSample(
        solver=solver,
        param_cell=format_params(params),
        seed=seed,
        best_config=best,
        best_value=best_value,
        evaluations=evaluator.evaluations,
        iterations=iterations,
        wall_time=time.perf_counter() - started,
        status=status,
        best_history=tuple(history),
    )
