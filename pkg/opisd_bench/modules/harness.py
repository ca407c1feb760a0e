import json
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

import pandas as pd

from . import config
from .capture import Capture
from .defs.formatters import clean_label, parse_open_branches
from .defs.grids import DEFAULT_GRIDS, DEFAULT_RUNS
from .defs.meta import ReferenceKind, RunStatus, SampleColumn
from .defs.solvers import get_solvers
from .enumeration import global_optimum
from .errors import ArchiveMismatchError, ExperimentConfigError, MetricInputError, ReferenceViolationError
from .metrics import cdf_breakpoints, compare_sets
from .network import RadialConfiguration, load_network
from .powerflow import Infeasible, OperationalLimits, PenaltySpec, PowerFlowOptions
from .solvers.collect import collect_solutions, expand_grid
from .solvers.problem import ProblemHandle
from .utils.hash import (
    calc_hash,
    digest_text,
    environment_fingerprint,
    get_cached_optimum,
    put_cached_optimum,
)
from .utils.log import log_error, log_info
from .utils.rng import make_rng

SAMPLE_COLUMNS = [column.value for column in SampleColumn]


@dataclass(frozen=True)
class SolverSpec:
    label: str
    solver: str
    runs: int = DEFAULT_RUNS
    fixed: Mapping = field(default_factory=dict)
    grid: Mapping = field(default_factory=dict)


def default_solver_specs() -> tuple:
    return tuple(
        SolverSpec(name, name, DEFAULT_RUNS, dict(spec["fixed"]), dict(spec["grid"]))
        for name, spec in DEFAULT_GRIDS.items()
    )


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    network_path: str
    mode: ReferenceKind = ReferenceKind.RELATIVE
    y_g: Optional[float] = None
    enumeration_budget: Optional[int] = config.DEFAULT_ENUMERATION_BUDGET
    seed: int = config.DEFAULT_SEED
    n_s: int = config.DEFAULT_N_S
    threshold: float = config.DEFAULT_STOP_THRESHOLD
    limits: Mapping = field(default_factory=dict)
    penalties: Mapping = field(default_factory=dict)
    power_flow: Mapping = field(default_factory=dict)
    solvers: tuple = field(default_factory=default_solver_specs)
    output_dir: str = "archives"
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "mode", ReferenceKind(self.mode))
        if not self.solvers:
            raise ExperimentConfigError("experiment declares no solvers")
        if self.mode == ReferenceKind.GLOBAL and self.y_g is None and self.enumeration_budget is None:
            raise ExperimentConfigError("mode G needs a declared y_g or an enumeration budget")
        if self.mode == ReferenceKind.RELATIVE and len(self.solvers) < 2:
            raise ExperimentConfigError("mode R compares at least two solvers")
        if self.workers < 1:
            raise ExperimentConfigError("workers must be at least 1")

        labels = [spec.label for spec in self.solvers]
        if len(set(labels)) != len(labels):
            raise ExperimentConfigError(f"duplicate solver labels in {labels}")
        cdf_file_names(labels)
        available = get_solvers()
        for spec in self.solvers:
            if spec.solver not in available:
                raise ExperimentConfigError(f"unknown solver '{spec.solver}', available: {sorted(available)}")
            if spec.runs < 1:
                raise ExperimentConfigError(f"{spec.label}: runs must be at least 1")
            try:
                for cell in expand_grid(spec.grid, self.fixed_params(spec)):
                    available[spec.solver].params_cls(**cell)
            except (TypeError, ValueError, KeyError) as e:
                raise ExperimentConfigError(f"{spec.label}: invalid parameters: {e}") from e

    @classmethod
    def from_mapping(cls, data: Mapping, base_dir=".") -> "ExperimentConfig":
        for key in ("experiment_id", "network"):
            if key not in data:
                raise ExperimentConfigError(f"experiment document lacks '{key}'")

        stop = data.get("stop", {})
        solvers = default_solver_specs()
        if "solvers" in data:
            solvers = tuple(
                SolverSpec(
                    label=entry.get("label", entry["solver"]),
                    solver=entry["solver"],
                    runs=int(entry.get("runs", DEFAULT_RUNS)),
                    fixed=dict(entry.get("fixed", {})),
                    grid=dict(entry.get("grid", {})),
                )
                for entry in data["solvers"]
            )
        try:
            return cls(
                experiment_id=str(data["experiment_id"]),
                network_path=os.path.abspath(os.path.join(base_dir, data["network"])),
                mode=ReferenceKind(data.get("mode", ReferenceKind.RELATIVE.value)),
                y_g=None if data.get("y_g") is None else float(data["y_g"]),
                enumeration_budget=data.get("enumeration_budget", config.DEFAULT_ENUMERATION_BUDGET),
                seed=int(data.get("seed", config.DEFAULT_SEED)),
                n_s=int(stop.get("n_s", config.DEFAULT_N_S)),
                threshold=float(stop.get("threshold", config.DEFAULT_STOP_THRESHOLD)),
                limits=dict(data.get("limits", {})),
                penalties=dict(data.get("penalties", {})),
                power_flow=dict(data.get("power_flow", {})),
                solvers=solvers,
                output_dir=os.path.abspath(os.path.join(base_dir, data.get("output_dir", "archives"))),
                workers=int(data.get("workers", 1)),
            )
        except (KeyError, ValueError) as e:
            if isinstance(e, ExperimentConfigError):
                raise
            raise ExperimentConfigError(f"invalid experiment document: {e}") from e

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, "r", encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ExperimentConfigError(f"{path} is not valid JSON: {e}") from e
        return cls.from_mapping(data, os.path.dirname(os.path.abspath(path)))

    def fixed_params(self, spec: SolverSpec) -> dict:
        return {"n_s": self.n_s, "threshold": self.threshold, **spec.fixed}

    def problem(self) -> ProblemHandle:
        net = load_network(self.network_path)
        try:
            return ProblemHandle.from_network(
                net,
                limits=OperationalLimits.from_network(net, **self.limits),
                penalties=PenaltySpec.from_mapping(self.penalties),
                pf_options=PowerFlowOptions(**self.power_flow),
            )
        except (TypeError, ValueError) as e:
            raise ExperimentConfigError(f"invalid problem settings: {e}") from e

    def to_document(self) -> dict:
        return {
            "experiment_id": self.experiment_id,
            "network": self.network_path,
            "mode": self.mode.value,
            "y_g": self.y_g,
            "enumeration_budget": self.enumeration_budget,
            "seed": self.seed,
            "stop": {"n_s": self.n_s, "threshold": self.threshold},
            "limits": dict(self.limits),
            "penalties": dict(self.penalties),
            "power_flow": dict(self.power_flow),
            "solvers": [
                {"label": s.label, "solver": s.solver, "runs": s.runs, "fixed": dict(s.fixed), "grid": dict(s.grid)}
                for s in self.solvers
            ],
            "output_dir": self.output_dir,
            "workers": self.workers,
        }


@dataclass
class RunArchive:
    experiment_id: str
    frame: pd.DataFrame
    manifest: dict
    directory: Optional[Path] = None

    @property
    def config(self) -> ExperimentConfig:
        return ExperimentConfig.from_mapping(self.manifest["config"])

    @property
    def labels(self) -> list:
        return list(dict.fromkeys(self.frame[SampleColumn.SOLVER.value]))

    def save(self, directory) -> Path:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=False)
        self.frame.to_csv(directory / config.SAMPLES_FILE, index=False, float_format="%.17g")
        with open(directory / config.MANIFEST_FILE, "w", encoding="utf-8") as f:
            json.dump(self.manifest, f, indent=2)
        self.directory = directory
        log_info(f"archive written to {directory}")
        return directory

    @classmethod
    def load(cls, directory) -> "RunArchive":
        directory = Path(directory)
        with open(directory / config.MANIFEST_FILE, "r", encoding="utf-8") as f:
            manifest = json.load(f)
        frame = pd.read_csv(
            directory / config.SAMPLES_FILE,
            dtype={SampleColumn.OPEN_BRANCHES.value: str, SampleColumn.PARAM_CELL.value: str},
            keep_default_na=False,
            float_precision="round_trip",
        )
        return cls(manifest["experiment_id"], frame, manifest, directory)


def find_next_available_directory(folder, name: str) -> Path:
    """`<folder>/<name>_NNNNN` with the first unused counter."""
    existing = {p.name for p in Path(folder).glob(f"{name}_*")}
    i = 1
    while f"{name}_{i:05d}" in existing:
        i += 1
    return Path(folder) / f"{name}_{i:05d}"


def run_experiment(cfg: ExperimentConfig, progress: bool = False, save: bool = True) -> RunArchive:
    """Run every declared solver `runs` times and archive the samples in schedule order."""
    problem = cfg.problem()
    net = problem.network
    started = time.time()

    rows = []
    for spec in cfg.solvers:
        samples = collect_solutions(
            problem,
            spec.solver,
            grid=spec.grid,
            fixed=cfg.fixed_params(spec),
            h_s=spec.runs,
            base_seed=cfg.seed,
            workers=cfg.workers,
            raise_errors=False,
            label=spec.label,
            progress=progress,
        )
        rows.extend(Capture.sample_row(cfg.experiment_id, net, sample) for sample in samples)

    manifest = {
        "experiment_id": cfg.experiment_id,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S", time.localtime(started)),
        "config": cfg.to_document(),
        "network_digest": calc_hash(cfg.network_path),
        "environment": environment_fingerprint(),
    }
    archive = RunArchive(cfg.experiment_id, pd.DataFrame(rows, columns=SAMPLE_COLUMNS), manifest)
    if save:
        archive.save(find_next_available_directory(cfg.output_dir, clean_label(cfg.experiment_id)))
        archive = RunArchive.load(archive.directory)
        verify_archive(archive, problem)
    return archive


def verify_archive(archive: RunArchive, problem: Optional[ProblemHandle] = None,
                   fraction: float = config.ARCHIVE_VERIFY_FRACTION, seed: int = config.DEFAULT_SEED) -> int:
    """Re-evaluate a random share of the archived best configurations; returns the rows checked."""
    problem = problem or archive.config.problem()
    net = problem.network
    ok = archive.frame[archive.frame[SampleColumn.STATUS.value] == RunStatus.OK.value]
    if ok.empty:
        return 0

    count = max(1, int(math.ceil(fraction * len(ok))))
    picked = make_rng(seed).choice(len(ok), size=min(count, len(ok)), replace=False)
    for position in sorted(int(p) for p in picked):
        row = ok.iloc[position]
        cfg = RadialConfiguration(net.check_ids(parse_open_branches(row[SampleColumn.OPEN_BRANCHES.value])))
        value = problem.evaluate(cfg)
        archived = float(row[SampleColumn.BEST_VALUE.value])
        if isinstance(value, Infeasible) or float(value) != archived:
            log_error(f"archived value {archived!r} of {row[SampleColumn.SOLVER.value]} does not re-evaluate ({value!r})")
            raise ArchiveMismatchError(
                f"run {row[SampleColumn.RUN_INDEX.value]} of {row[SampleColumn.SOLVER.value]} re-evaluates to "
                f"{value!r}, archived {archived!r}"
            )
    log_info(f"archive verified on {len(picked)} of {len(ok)} rows")
    return len(picked)


def _optimum_cache_key(cfg: ExperimentConfig) -> str:
    settings = json.dumps(
        {"limits": cfg.limits, "penalties": cfg.penalties, "power_flow": cfg.power_flow},
        sort_keys=True,
    )
    return f"{calc_hash(cfg.network_path)}:{digest_text(settings)}"


def resolve_global_optimum(cfg: ExperimentConfig, budget: Optional[int] = None, progress: bool = False) -> float:
    """y_G from the experiment, the on-disk cache, or a budgeted enumeration (then cached)."""
    if cfg.y_g is not None:
        return cfg.y_g
    key = _optimum_cache_key(cfg)
    cached = get_cached_optimum(key)
    if cached is not None:
        return float(cached["y_g"])

    problem = cfg.problem()
    result = global_optimum(
        problem.network,
        problem.limits,
        problem.penalties,
        budget if budget is not None else cfg.enumeration_budget,
        problem.pf_options,
        progress,
    )
    put_cached_optimum(key, {
        "y_g": result.y_g,
        "optimal": [c.key(problem.network) for c in result.optimal_configs],
        "enumerated": result.enumerated,
        "infeasible": result.infeasible,
    })
    return result.y_g


def compare(archive: RunArchive, mode, y_g: Optional[float] = None, eps: float = 0.0,
            budget: Optional[int] = None, progress: bool = False):
    """Rank the archived solvers against the global optimum (G) or their pooled best values (R)."""
    mode = ReferenceKind(mode)
    sets = Capture.solution_sets(archive.frame)
    if not sets:
        raise MetricInputError("archive holds no feasible results")

    if mode == ReferenceKind.RELATIVE:
        if len(sets) < 2:
            raise MetricInputError("mode R needs at least two solvers")
        return compare_sets(sets, mode, eps=eps)

    if y_g is None:
        y_g = resolve_global_optimum(archive.config, budget, progress)
    for s in sets:
        if min(s.values) < y_g - config.OPTIMUM_ATOL:
            raise ReferenceViolationError(
                f"{s.label} reports {min(s.values)!r} below the global optimum {y_g!r}"
            )
    return compare_sets(sets, mode, y_g=y_g, eps=eps)


def write_report(report, directory, sets=None) -> Path:
    """report.json and report.csv, plus summary.csv and dominance.csv."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / config.REPORT_JSON_FILE, "w", encoding="utf-8") as f:
        json.dump(Capture.report_dict(report), f, indent=2)
    pd.DataFrame(Capture.report_rows(report)).to_csv(directory / config.REPORT_CSV_FILE, index=False, float_format="%.17g")
    if sets is not None:
        pd.DataFrame(Capture.summary_rows(sets)).to_csv(directory / config.SUMMARY_CSV_FILE, index=False, float_format="%.17g")
    pd.DataFrame(
        Capture.dominance_rows(report),
        columns=["dominant", "dominated", "deterministic", "first_order", "second_order"],
    ).to_csv(directory / config.DOMINANCE_CSV_FILE, index=False)
    log_info(f"report written to {directory}")
    return directory


def load_comparison(archive: RunArchive, report_path):
    """Rebuild the comparison stored in a report.json and check it against the archive."""
    with open(report_path, "r", encoding="utf-8") as f:
        stored = json.load(f)
    reference = stored["reference"]
    report = compare(archive, stored["mode"], reference.get("y_g"), stored.get("eps", 0.0))
    if report.reference.digest != reference["values_digest"]:
        raise ArchiveMismatchError(f"{report_path} was not computed from this archive")
    return report


def cdf_file_names(labels) -> dict:
    """Label -> CDF file stem; two labels may not share a file, nor take the reference's."""
    names, owners = {}, {"reference": None}
    for label in labels:
        name = clean_label(label)
        key = name.casefold()
        if key in owners:
            other = "the reference" if owners[key] is None else repr(owners[key])
            raise ExperimentConfigError(f"solver label {label!r} would share cdf_{name}.csv with {other}")
        owners[key] = label
        names[label] = name
    return names


def emit_cdf_data(report, directory) -> list:
    """One (y, F) breakpoint file per test CDF plus cdf_reference.csv; returns the written paths."""
    names = cdf_file_names([c.label for c in report.test_cdfs])
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, cdf in [(names[c.label], c) for c in report.test_cdfs] + [("reference", report.reference)]:
        path = directory / f"cdf_{name}.csv"
        pd.DataFrame(cdf_breakpoints(cdf), columns=["y", "F"]).to_csv(path, index=False, float_format="%.17g")
        written.append(path)
    return written
