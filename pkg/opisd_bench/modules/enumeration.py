import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Optional

from networkx.utils import UnionFind
from tqdm import tqdm

from . import config
from .errors import EnumerationBudgetExceeded, NoFeasibleSolutionError
from .network import Network, RadialConfiguration, count_radial_configs
from .powerflow import Infeasible, OperationalLimits, PenaltySpec, PowerFlowOptions, penalized_objective
from .utils.log import log_debug, log_info


@dataclass(frozen=True)
class Chain:
    """Maximal path of collapsed branches whose inner vertices have degree 2."""

    start: int
    end: int
    branch_ids: tuple

    @property
    def is_loop(self) -> bool:
        return self.start == self.end


@dataclass(frozen=True)
class Kernel:
    """Series-reduced collapsed graph.

    `vertices` are the collapsed vertices of degree >= 3 plus vertex 0; every spanning tree of the
    network closes all `bridge_ids`, all branches of the kernel chains it selects, and all but one
    branch of every other chain.
    """

    vertices: tuple
    chains: tuple
    bridge_ids: frozenset


def _series_reduce(net: Network) -> Kernel:
    adjacency = {v: [] for v in range(net.n_vertices)}
    for idx, (u, v) in enumerate(net.collapsed_endpoints):
        if u != v:
            adjacency[u].append((v, idx))
            adjacency[v].append((u, idx))

    # pendant pruning: a degree-1 vertex hangs on a bridge
    bridges = set()
    pending = [v for v, edges in adjacency.items() if v != 0 and len(edges) == 1]
    while pending:
        vertex = pending.pop()
        if vertex not in adjacency or len(adjacency[vertex]) != 1:
            continue
        neighbor, idx = adjacency.pop(vertex)[0]
        bridges.add(net.branches[idx].id)
        adjacency[neighbor] = [(w, i) for w, i in adjacency[neighbor] if i != idx]
        if neighbor != 0 and len(adjacency[neighbor]) == 1:
            pending.append(neighbor)

    kernel_vertices = sorted(v for v, edges in adjacency.items() if v == 0 or len(edges) >= 3)
    is_kernel = set(kernel_vertices)
    used = set()
    chains = []
    for start in kernel_vertices:
        for neighbor, idx in adjacency[start]:
            if idx in used:
                continue
            path = [idx]
            previous_edge, current = idx, neighbor
            while current not in is_kernel:
                previous_edge = next(i for _, i in adjacency[current] if i != previous_edge)
                path.append(previous_edge)
                current = next(w for w, i in adjacency[current] if i == previous_edge)
            used.update(path)
            chains.append(Chain(start, current, tuple(net.ordered(net.branches[i].id for i in path))))

    return Kernel(tuple(kernel_vertices), tuple(chains), frozenset(bridges))


def _kernel_spanning_trees(n_vertices: int, edges: list) -> Iterator[tuple]:
    """Every spanning tree of a multigraph on vertices 0..n-1, as a tuple of edge positions.

    Contraction/deletion: the first edge joining two components is either contracted or, when
    the remaining graph stays connected without it, deleted.
    """

    def stays_connected(labels, start):
        uf = UnionFind(set(labels))
        for u, v in edges[start:]:
            uf.union(labels[u], labels[v])
        roots = {uf[label] for label in labels}
        return len(roots) == 1

    def recurse(position, labels, chosen):
        if len(chosen) == n_vertices - 1:
            yield tuple(chosen)
            return
        while position < len(edges) and labels[edges[position][0]] == labels[edges[position][1]]:
            position += 1
        if position == len(edges):
            return
        u, v = edges[position]
        keep, merge = labels[u], labels[v]
        contracted = tuple(keep if label == merge else label for label in labels)
        yield from recurse(position + 1, contracted, chosen + [position])
        if stays_connected(labels, position + 1):
            yield from recurse(position + 1, labels, chosen)

    yield from recurse(0, tuple(range(n_vertices)), [])


def enumerate_radial_configs(net: Network, budget: Optional[int] = config.DEFAULT_ENUMERATION_BUDGET) -> Iterator[RadialConfiguration]:
    """Yield every radial configuration of `net` exactly once.

    Raises EnumerationBudgetExceeded before the first configuration when the exact count exceeds
    `budget` (None disables the guard).
    """
    total = count_radial_configs(net)
    if budget is not None and total > budget:
        raise EnumerationBudgetExceeded(0, total, budget)

    kernel = _series_reduce(net)
    position_of = {vertex: pos for pos, vertex in enumerate(kernel.vertices)}
    tree_chains = [c for c in kernel.chains if not c.is_loop]
    loop_chains = [c for c in kernel.chains if c.is_loop]
    kernel_edges = [(position_of[c.start], position_of[c.end]) for c in tree_chains]
    log_debug(
        f"kernel of {len(kernel.vertices)} vertices, {len(tree_chains)} chains, "
        f"{len(loop_chains)} loop chains, {len(kernel.bridge_ids)} bridges"
    )

    always_open = net.self_loop_ids
    produced = 0
    for tree in _kernel_spanning_trees(len(kernel.vertices), kernel_edges):
        in_tree = set(tree)
        cotree = [tree_chains[i].branch_ids for i in range(len(tree_chains)) if i not in in_tree]
        cotree += [c.branch_ids for c in loop_chains]
        for choice in itertools.product(*cotree):
            produced += 1
            if budget is not None and produced > budget:
                raise EnumerationBudgetExceeded(produced - 1, total, budget)
            yield RadialConfiguration(always_open | frozenset(choice))


@dataclass(frozen=True)
class GlobalOptimum:
    y_g: float
    optimal_configs: tuple
    enumerated: int
    infeasible: int

    @property
    def total(self) -> int:
        return self.enumerated + self.infeasible


def global_optimum(
    net: Network,
    limits: Optional[OperationalLimits] = None,
    penalties: Optional[PenaltySpec] = None,
    budget: Optional[int] = config.DEFAULT_ENUMERATION_BUDGET,
    pf_options: Optional[PowerFlowOptions] = None,
    progress: bool = False,
) -> GlobalOptimum:
    """Exact minimum of the penalized objective over all radial configurations."""
    limits = limits or OperationalLimits.from_network(net)
    penalties = penalties or PenaltySpec()
    pf_options = pf_options or PowerFlowOptions()

    stream = enumerate_radial_configs(net, budget)
    total = count_radial_configs(net) if progress else None
    best_value = math.inf
    optimal = []
    enumerated = infeasible = 0
    for cfg in tqdm(stream, total=total, desc="enumerate", disable=not progress):
        value = penalized_objective(net, cfg, limits, penalties, pf_options)
        if isinstance(value, Infeasible):
            infeasible += 1
            continue
        enumerated += 1
        if value < best_value:
            best_value, optimal = value, [cfg]
        elif value == best_value:
            optimal.append(cfg)

    if not optimal:
        raise NoFeasibleSolutionError(f"all {infeasible} radial configurations are infeasible")

    optimal.sort(key=lambda cfg: cfg.key(net))
    log_info(
        f"global optimum {best_value:.10g} p.u. over {enumerated} feasible configurations "
        f"({infeasible} infeasible, {len(optimal)} optimal)"
    )
    return GlobalOptimum(best_value, tuple(optimal), enumerated, infeasible)
