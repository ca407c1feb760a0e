import os
from dataclasses import dataclass
from typing import Callable

from .loader import load_solvers


@dataclass(frozen=True)
class SolverDef:
    name: str
    params_cls: type
    run: Callable
    display_name: str


SOLVERS = {}

_solver_dir = os.path.join(os.path.dirname(os.path.dirname(__file__)), "solvers")


def get_solvers() -> dict:
    # solver modules import the network stack, so they are loaded on first use
    if not SOLVERS:
        load_solvers(_solver_dir, __package__.rsplit(".", 1)[0] + ".solvers", SOLVERS)
    return SOLVERS


def get_solver(name: str) -> SolverDef:
    solvers = get_solvers()
    if name not in solvers:
        raise KeyError(f"unknown solver '{name}', available: {sorted(solvers)}")
    return solvers[name]
