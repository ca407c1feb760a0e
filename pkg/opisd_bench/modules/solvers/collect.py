import dataclasses
import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Mapping, Optional, Sequence

import numpy as np
from tqdm import tqdm

from .. import config
from ..defs.formatters import format_params
from ..defs.meta import RunStatus
from ..defs.solvers import get_solver
from ..utils.log import log_debug, log_error, log_info
from ..utils.rng import derive_seed
from .problem import SolutionSample


def expand_values(spec) -> list:
    """A grid axis is either a list of values or a `{start, stop, step}` range with `stop` included."""
    if isinstance(spec, Mapping):
        start, stop, step = spec["start"], spec["stop"], spec["step"]
        if step <= 0 or stop < start:
            raise ValueError(f"invalid grid range {dict(spec)}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        values = start + step * np.arange(count)
        if all(isinstance(v, int) for v in (start, stop, step)):
            return [int(v) for v in values]
        decimals = max(0, -int(math.floor(math.log10(step)))) + 3
        return [float(round(v, decimals)) for v in values]
    if isinstance(spec, (list, tuple)):
        if not spec:
            raise ValueError("grid axis has no values")
        return list(spec)
    return [spec]


def expand_grid(grid: Optional[Mapping] = None, fixed: Optional[Mapping] = None) -> list:
    """All combinations of the varied parameters, in axis-declaration order, merged over `fixed`."""
    grid = grid or {}
    fixed = dict(fixed or {})
    names = list(grid)
    axes = [expand_values(grid[name]) for name in names]
    return [{**fixed, **dict(zip(names, combo))} for combo in itertools.product(*axes)]


def _run_task(task):
    problem, solver_name, label, params, seed, run_index, raise_errors = task
    solver = get_solver(solver_name)
    started = time.perf_counter()
    try:
        sample = solver.run(problem, params, seed)
    except Exception as e:
        if raise_errors:
            raise
        log_error(f"{label} run {run_index} (seed {seed}) failed: {e}")
        return SolutionSample(
            solver=label,
            param_cell=format_params(params),
            seed=seed,
            best_config=None,
            best_value=math.inf,
            evaluations=0,
            iterations=0,
            wall_time=time.perf_counter() - started,
            status=RunStatus.FAILED,
            run_index=run_index,
        )
    log_debug(f"{label} run {run_index}: {sample.best_value:.10g} after {sample.iterations} iterations")
    return dataclasses.replace(sample, solver=label, run_index=run_index)


def collect_solutions(
    problem,
    solver: str,
    grid: Optional[Mapping] = None,
    fixed: Optional[Mapping] = None,
    h_s: int = 1,
    seeds: Optional[Sequence[int]] = None,
    base_seed: int = config.DEFAULT_SEED,
    workers: int = 1,
    raise_errors: bool = True,
    label: Optional[str] = None,
    progress: bool = False,
) -> list:
    """Run `solver` h_s times over the parameter grid and return the samples in schedule order.

    Run k uses grid cell k mod (number of cells) and seed `seeds[k]`, or base_seed + k when no
    explicit schedule is given.
    """
    if h_s < 1:
        raise ValueError("h_s must be at least 1")
    if seeds is not None and len(seeds) < h_s:
        raise ValueError(f"seed schedule has {len(seeds)} entries for {h_s} runs")

    solver_def = get_solver(solver)
    label = label or solver_def.name
    cells = expand_grid(grid, fixed)
    params = [solver_def.params_cls(**cell) for cell in cells]

    tasks = []
    for k in range(h_s):
        seed = seeds[k] if seeds is not None else derive_seed(base_seed, k)
        tasks.append((problem, solver_def.name, label, params[k % len(params)], seed, k, raise_errors))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_run_task, tasks)
            samples = list(tqdm(results, total=h_s, desc=label, disable=not progress))
    else:
        samples = [_run_task(task) for task in tqdm(tasks, desc=label, disable=not progress)]

    finite = [s.best_value for s in samples if s.status == RunStatus.OK]
    if finite:
        log_info(f"{label}: {len(samples)} runs over {len(cells)} parameter cells, best {min(finite):.10g}")
    return samples
