from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from . import config
from .defs.meta import ViolationKind
from .errors import NotRadialError, PowerFlowDivergedError
from .network import Network, RadialConfiguration, is_radial
from .trace import Trace
from .utils.log import log_debug


@dataclass(frozen=True)
class PowerFlowOptions:
    slack_v: float = config.DEFAULT_SLACK_V
    tol: float = config.DEFAULT_PF_TOL
    max_iter: int = config.DEFAULT_PF_MAX_ITER

    def __post_init__(self):
        if self.tol <= 0.0:
            raise ValueError("power flow tolerance must be positive")
        if self.max_iter < 1:
            raise ValueError("power flow needs at least one iteration")


@dataclass(frozen=True, eq=False)
class PowerFlowResult:
    node_voltages: np.ndarray  # complex p.u., network node order
    branch_currents: Mapping[str, float]  # magnitude p.u., closed branches only
    iterations: int
    converged: bool = True


@dataclass(frozen=True)
class Diverged:
    iterations: int
    reason: str
    converged: bool = False


@dataclass(frozen=True)
class Infeasible:
    reason: str


@dataclass(frozen=True)
class OperationalLimits:
    v_min: Mapping[str, float]
    v_max: Mapping[str, float]
    i_max: Mapping[str, Optional[float]]

    @classmethod
    def from_network(cls, net: Network, v_min=None, v_max=None, i_max=None) -> "OperationalLimits":
        """Limits read from the network; scalar overrides replace every per-element value."""
        return cls(
            v_min={n.id: n.v_min if v_min is None else v_min for n in net.nodes},
            v_max={n.id: n.v_max if v_max is None else v_max for n in net.nodes},
            i_max={b.id: b.i_max if i_max is None else i_max for b in net.branches},
        )


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subject_id: str
    delta_v: float


@dataclass(frozen=True)
class PenaltySpec:
    rho: Mapping[ViolationKind, float] = field(
        default_factory=lambda: {kind: config.DEFAULT_PENALTY for kind in ViolationKind}
    )

    def __post_init__(self):
        for kind, value in self.rho.items():
            if not value > 0.0:
                raise ValueError(f"penalty factor for {ViolationKind(kind).value} must be positive")

    @classmethod
    def from_mapping(cls, values: Mapping[str, float]) -> "PenaltySpec":
        rho = {kind: config.DEFAULT_PENALTY for kind in ViolationKind}
        for name, value in values.items():
            rho[ViolationKind(name)] = float(value)
        return cls(rho)

    def factor(self, kind: ViolationKind) -> float:
        return self.rho.get(kind, 0.0)


def _path_matrix(net: Network, open_ids):
    """Node-to-branch path incidence of the closed tree (transpose of the BIBC matrix)."""
    order = Trace.feeder_order(net, open_ids)
    if len(order) != net.n_nodes:
        raise NotRadialError("configuration leaves nodes unsupplied")
    path = np.zeros((net.n_nodes, net.n_branches), dtype=float)
    for node_idx, parent_idx, branch_idx in order:
        if parent_idx is None:
            continue
        path[node_idx] = path[parent_idx]
        path[node_idx, branch_idx] = 1.0
    return path


def solve_power_flow(
    net: Network,
    cfg: RadialConfiguration,
    slack_v: float = config.DEFAULT_SLACK_V,
    tol: float = config.DEFAULT_PF_TOL,
    max_iter: int = config.DEFAULT_PF_MAX_ITER,
):
    """Backward/forward sweep for constant-power loads on a radial configuration.

    The sweep runs in matrix form: branch currents are the sums of downstream load currents
    (backward), node voltages are the slack voltage minus the drops along the path to the
    supply (forward). Returns a PowerFlowResult, or a Diverged value when the voltage change
    stays above `tol` after `max_iter` sweeps or a value becomes non-finite.
    """
    if tol <= 0.0 or max_iter < 1:
        raise ValueError("power flow needs tol > 0 and max_iter >= 1")
    if not is_radial(net, cfg):
        raise NotRadialError("power flow requires a radial configuration")

    path = _path_matrix(net, cfg.open_ids)
    impedance = np.array([b.impedance for b in net.branches], dtype=complex)
    power = np.array([complex(n.p_load, n.q_load) for n in net.nodes], dtype=complex)

    voltages = np.full(net.n_nodes, complex(slack_v), dtype=complex)
    branch_currents = np.zeros(net.n_branches, dtype=complex)

    with np.errstate(all="ignore"):
        for iteration in range(1, max_iter + 1):
            load_currents = np.conj(power / voltages)
            branch_currents = path.T @ load_currents
            updated = slack_v - path @ (impedance * branch_currents)

            if not np.all(np.isfinite(updated)):
                log_debug(f"power flow diverged at iteration {iteration}: non-finite voltage")
                return Diverged(iteration, "non-finite voltage")

            change = np.max(np.abs(updated - voltages))
            voltages = updated
            if change < tol:
                closed = {
                    b.id: float(abs(branch_currents[idx]))
                    for idx, b in enumerate(net.branches)
                    if b.id not in cfg.open_ids
                }
                return PowerFlowResult(voltages, closed, iteration)

    log_debug(f"power flow did not converge in {max_iter} iterations")
    return Diverged(max_iter, "no convergence")


def total_losses(net: Network, result, cfg: RadialConfiguration) -> float:
    """P_tot = sum of R_b * I_b^2 over the closed branches."""
    if not result.converged:
        raise PowerFlowDivergedError("losses are undefined for a diverged power flow")
    losses = 0.0
    for branch in net.branches:
        if branch.id in cfg.open_ids:
            continue
        losses += branch.resistance * result.branch_currents[branch.id] ** 2
    return losses


def compute_violations(net: Network, result, limits: OperationalLimits) -> list:
    if not result.converged:
        raise PowerFlowDivergedError("violations are undefined for a diverged power flow")

    violations = []
    magnitudes = np.abs(result.node_voltages)
    for node, magnitude in zip(net.nodes, magnitudes):
        low, high = limits.v_min[node.id], limits.v_max[node.id]
        if magnitude < low:
            violations.append(Violation(ViolationKind.UNDERVOLTAGE, node.id, float(low - magnitude)))
        elif magnitude > high:
            violations.append(Violation(ViolationKind.OVERVOLTAGE, node.id, float(magnitude - high)))

    for branch_id, current in result.branch_currents.items():
        i_max = limits.i_max.get(branch_id)
        if i_max is not None and current > i_max:
            violations.append(Violation(ViolationKind.OVERCURRENT, branch_id, float(current - i_max)))
    return violations


def penalty_multiplier(violations, penalties: PenaltySpec) -> float:
    return 1.0 + sum(penalties.factor(v.kind) * v.delta_v ** 2 for v in violations)


def penalized_objective(
    net: Network,
    cfg: RadialConfiguration,
    limits: OperationalLimits,
    penalties: PenaltySpec,
    options: PowerFlowOptions = PowerFlowOptions(),
):
    """f_p = P_tot * (1 + sum rho_i dv_i^2), or Infeasible when the power flow diverges."""
    result = solve_power_flow(net, cfg, options.slack_v, options.tol, options.max_iter)
    if not result.converged:
        return Infeasible(result.reason)
    losses = total_losses(net, result, cfg)
    violations = compute_violations(net, result, limits)
    if not violations:
        return losses
    return losses * penalty_multiplier(violations, penalties)
