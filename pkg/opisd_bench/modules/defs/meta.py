from enum import Enum


class NodeKind(str, Enum):
    SUPPLY = "supply"
    LOAD = "load"


class ViolationKind(str, Enum):
    UNDERVOLTAGE = "undervoltage"
    OVERVOLTAGE = "overvoltage"
    OVERCURRENT = "overcurrent"


class ReferenceKind(str, Enum):
    GLOBAL = "G"
    RELATIVE = "R"


class RunStatus(str, Enum):
    OK = "ok"
    DEGENERATE = "degenerate"
    INFEASIBLE = "infeasible"
    FAILED = "failed"


# Sample CSV columns, in archive order
class SampleColumn(str, Enum):
    EXPERIMENT_ID = "experiment_id"
    SOLVER = "solver"
    PARAM_CELL = "param_cell"
    SEED = "seed"
    RUN_INDEX = "run_index"
    BEST_VALUE = "best_value_pu"
    OPEN_BRANCHES = "open_branches"
    EVALUATIONS = "evaluations"
    ITERATIONS = "iterations"
    WALL_TIME = "wall_time_s"
    STATUS = "status"
