import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Optional

import numpy as np
from networkx.utils import UnionFind

from .defs.meta import NodeKind
from .errors import (
    BranchNotOpenError,
    NetworkFormatError,
    NotOnLoopError,
    NotRadialError,
    UnknownBranchError,
)
from .trace import Trace
from .utils.log import log_info, log_warning


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    p_load: float
    q_load: float
    v_min: float
    v_max: float


@dataclass(frozen=True)
class Branch:
    id: str
    from_id: str
    to_id: str
    resistance: float
    reactance: float
    i_max: Optional[float] = None

    @property
    def impedance(self) -> complex:
        return complex(self.resistance, self.reactance)


@dataclass(frozen=True, eq=False)
class Network:
    """Weakly meshed distribution network.

    Immutable after parsing. Radiality is defined on the supply-collapsed graph: every supply
    node maps to vertex 0 and load nodes map to vertices 1..N-S in document order.
    """

    nodes: tuple
    branches: tuple
    supply_ids: frozenset
    base_power: float
    base_voltage: float
    initial_open: frozenset = field(default_factory=frozenset)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    @property
    def n_supplies(self) -> int:
        return len(self.supply_ids)

    @property
    def n_open(self) -> int:
        """A = B - N + S, the number of open branches of every radial configuration."""
        return self.n_branches - self.n_nodes + self.n_supplies

    @cached_property
    def node_index(self) -> dict:
        return {node.id: idx for idx, node in enumerate(self.nodes)}

    @cached_property
    def branch_index(self) -> dict:
        return {branch.id: idx for idx, branch in enumerate(self.branches)}

    @cached_property
    def ordered_supply_ids(self) -> tuple:
        return tuple(node.id for node in self.nodes if node.id in self.supply_ids)

    @cached_property
    def vertex_of(self) -> tuple:
        vertices = []
        next_vertex = 1
        for node in self.nodes:
            if node.id in self.supply_ids:
                vertices.append(0)
            else:
                vertices.append(next_vertex)
                next_vertex += 1
        return tuple(vertices)

    @property
    def n_vertices(self) -> int:
        return self.n_nodes - self.n_supplies + 1

    @cached_property
    def collapsed_endpoints(self) -> tuple:
        return tuple(
            (self.vertex_of[self.node_index[b.from_id]], self.vertex_of[self.node_index[b.to_id]])
            for b in self.branches
        )

    @cached_property
    def self_loop_ids(self) -> frozenset:
        """Branches joining two supply nodes: open in every radial configuration."""
        return frozenset(
            b.id for b, (u, v) in zip(self.branches, self.collapsed_endpoints) if u == v
        )

    def ordered(self, branch_ids: Iterable[str]) -> list:
        """Branch ids sorted by document order, the only order random choices draw from."""
        return sorted(branch_ids, key=self.branch_index.__getitem__)

    def check_ids(self, branch_ids: Iterable[str]) -> frozenset:
        ids = frozenset(branch_ids)
        unknown = ids - self.branch_index.keys()
        if unknown:
            raise UnknownBranchError(f"unknown branch ids: {sorted(unknown)}")
        return ids

    @property
    def initial_configuration(self) -> "RadialConfiguration":
        return RadialConfiguration(self.initial_open)


@dataclass(frozen=True)
class RadialConfiguration:
    open_ids: frozenset

    def __post_init__(self):
        if not isinstance(self.open_ids, frozenset):
            object.__setattr__(self, "open_ids", frozenset(self.open_ids))

    def genes(self, net: Network) -> np.ndarray:
        """Length-B gene string: 0 = open, 1 = closed, in document branch order."""
        genes = np.ones(net.n_branches, dtype=np.uint8)
        for branch_id in self.open_ids:
            genes[net.branch_index[branch_id]] = 0
        return genes

    @classmethod
    def from_genes(cls, net: Network, genes) -> "RadialConfiguration":
        genes = np.asarray(genes)
        if genes.shape != (net.n_branches,):
            raise ValueError(f"expected {net.n_branches} genes, got shape {genes.shape}")
        return cls(frozenset(net.branches[i].id for i in np.flatnonzero(genes == 0)))

    def closed_ids(self, net: Network) -> list:
        return [b.id for b in net.branches if b.id not in self.open_ids]

    def key(self, net: Network) -> str:
        return ";".join(net.ordered(self.open_ids))


def _require(record, key, where):
    if key not in record:
        raise NetworkFormatError(f"{where}: missing field '{key}'")
    return record[key]


def _as_float(value, name, where):
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise NetworkFormatError(f"{where}: field '{name}' is not a number: {value!r}") from None
    if not math.isfinite(number):
        raise NetworkFormatError(f"{where}: field '{name}' is not finite")
    return number


def _parse_node(record):
    node_id = str(_require(record, "id", "node"))
    where = f"node {node_id}"
    try:
        kind = NodeKind(_require(record, "kind", where))
    except ValueError:
        raise NetworkFormatError(f"{where}: kind must be 'supply' or 'load'") from None
    node = Node(
        id=node_id,
        kind=kind,
        p_load=_as_float(record.get("p_pu", 0.0), "p_pu", where),
        q_load=_as_float(record.get("q_pu", 0.0), "q_pu", where),
        v_min=_as_float(_require(record, "v_min", where), "v_min", where),
        v_max=_as_float(_require(record, "v_max", where), "v_max", where),
    )
    if kind == NodeKind.SUPPLY and (node.p_load != 0.0 or node.q_load != 0.0):
        raise NetworkFormatError(f"{where}: supply nodes carry no load")
    if not 0.0 < node.v_min <= node.v_max:
        raise NetworkFormatError(f"{where}: voltage limits must satisfy 0 < v_min <= v_max")
    return node


def _parse_branch(record, node_ids):
    branch_id = str(_require(record, "id", "branch"))
    where = f"branch {branch_id}"
    from_id = str(_require(record, "from", where))
    to_id = str(_require(record, "to", where))
    if from_id not in node_ids or to_id not in node_ids:
        raise NetworkFormatError(f"{where}: references an unknown node")
    if from_id == to_id:
        raise NetworkFormatError(f"{where}: endpoints must be distinct")

    resistance = _as_float(_require(record, "r_pu", where), "r_pu", where)
    reactance = _as_float(_require(record, "x_pu", where), "x_pu", where)
    if resistance < 0.0 or reactance < 0.0:
        raise NetworkFormatError(f"{where}: impedance must be non-negative")
    if resistance == 0.0 and reactance == 0.0:
        raise NetworkFormatError(f"{where}: zero-impedance branches are not supported")

    i_max = record.get("i_max_pu")
    if i_max is not None:
        i_max = _as_float(i_max, "i_max_pu", where)
        if i_max <= 0.0:
            raise NetworkFormatError(f"{where}: i_max_pu must be positive")

    return Branch(branch_id, from_id, to_id, resistance, reactance, i_max), bool(
        record.get("initially_open", False)
    )


def parse_network(text) -> Network:
    """Build a validated Network from a JSON document (string, bytes or already-decoded mapping)."""
    if isinstance(text, (str, bytes, bytearray)):
        try:
            document = json.loads(text)
        except json.JSONDecodeError as e:
            raise NetworkFormatError(f"network document is not valid JSON: {e}") from None
    else:
        document = text
    if not isinstance(document, Mapping):
        raise NetworkFormatError("network document must be a JSON object")

    base_power = _as_float(_require(document, "base_power_kVA", "network"), "base_power_kVA", "network")
    base_voltage = _as_float(_require(document, "base_voltage_kV", "network"), "base_voltage_kV", "network")

    nodes = tuple(_parse_node(record) for record in _require(document, "nodes", "network"))
    node_ids = {node.id for node in nodes}
    if len(node_ids) != len(nodes):
        raise NetworkFormatError("duplicate node ids")

    parsed = [_parse_branch(record, node_ids) for record in _require(document, "branches", "network")]
    branches = tuple(branch for branch, _ in parsed)
    if len({b.id for b in branches}) != len(branches):
        raise NetworkFormatError("duplicate branch ids")

    supply_ids = frozenset(node.id for node in nodes if node.kind == NodeKind.SUPPLY)
    if not supply_ids:
        raise NetworkFormatError("network needs at least one supply node")

    net = Network(
        nodes=nodes,
        branches=branches,
        supply_ids=supply_ids,
        base_power=base_power,
        base_voltage=base_voltage,
        initial_open=frozenset(branch.id for branch, is_open in parsed if is_open),
    )

    if not _is_connected(net):
        raise NetworkFormatError("network is disconnected with all branches closed")
    if net.n_open < 0:
        raise NetworkFormatError("network has fewer branches than a spanning tree needs")
    if len(net.initial_open) != net.n_open:
        raise NetworkFormatError(
            f"initial open set has {len(net.initial_open)} branches, expected A = {net.n_open}"
        )
    if not is_radial(net, net.initial_open):
        log_warning("initial configuration of the network document is not radial")

    log_info(
        f"network parsed: N={net.n_nodes} B={net.n_branches} S={net.n_supplies} A={net.n_open}"
    )
    return net


def load_network(path) -> Network:
    with open(path, "r", encoding="utf-8") as f:
        return parse_network(f.read())


def _is_connected(net: Network) -> bool:
    uf = UnionFind(range(net.n_vertices))
    for u, v in net.collapsed_endpoints:
        uf.union(u, v)
    return len({uf[v] for v in range(net.n_vertices)}) == 1


def _open_set(cfg) -> frozenset:
    return cfg.open_ids if isinstance(cfg, RadialConfiguration) else frozenset(cfg)


def is_radial(net: Network, cfg) -> bool:
    """True iff the closed branches form a spanning tree of the supply-collapsed graph."""
    open_ids = net.check_ids(_open_set(cfg))
    if net.n_branches - len(open_ids) != net.n_vertices - 1:
        return False

    uf = UnionFind(range(net.n_vertices))
    for branch, (u, v) in zip(net.branches, net.collapsed_endpoints):
        if branch.id in open_ids:
            continue
        if uf[u] == uf[v]:
            return False
        uf.union(u, v)
    # n-1 edges without a cycle span all n vertices
    return True


def detect_loop(net: Network, cfg: RadialConfiguration, close_id: str) -> tuple:
    """Branches of the single cycle created by closing `close_id`, ending with `close_id`."""
    net.check_ids([close_id])
    if close_id not in cfg.open_ids:
        raise BranchNotOpenError(f"branch {close_id} is not open")

    u, v = net.collapsed_endpoints[net.branch_index[close_id]]
    path = Trace.tree_path(net, cfg.open_ids, u, v)
    if path is None:
        raise NotRadialError("configuration is not radial: loop endpoints are disconnected")
    return tuple(net.branches[idx].id for idx in path) + (close_id,)


def branch_exchange(net: Network, cfg: RadialConfiguration, close_id: str, open_id: str) -> RadialConfiguration:
    loop = detect_loop(net, cfg, close_id)
    if open_id not in loop:
        raise NotOnLoopError(f"branch {open_id} is not on the loop closed by {close_id}")
    if open_id == close_id:
        return cfg
    return RadialConfiguration((cfg.open_ids - {close_id}) | {open_id})


def _laplacian(net: Network) -> np.ndarray:
    laplacian = np.zeros((net.n_vertices, net.n_vertices), dtype=object)
    for u, v in net.collapsed_endpoints:
        if u == v:
            continue
        laplacian[u, u] += 1
        laplacian[v, v] += 1
        laplacian[u, v] -= 1
        laplacian[v, u] -= 1
    return laplacian


def _bareiss_determinant(matrix: np.ndarray) -> int:
    """Fraction-free Gaussian elimination on an object array of Python ints."""
    m = matrix.copy()
    n = m.shape[0]
    if n == 0:
        return 1
    sign = 1
    previous = 1
    for k in range(n - 1):
        if m[k, k] == 0:
            nonzero = [i for i in range(k + 1, n) if m[i, k] != 0]
            if not nonzero:
                return 0
            swap = nonzero[0]
            m[[k, swap]] = m[[swap, k]]
            sign = -sign
        pivot = m[k, k]
        # division is exact (Sylvester identity)
        m[k + 1:, k + 1:] = (
            m[k + 1:, k + 1:] * pivot - np.outer(m[k + 1:, k], m[k, k + 1:])
        ) // previous
        m[k + 1:, k] = 0
        previous = pivot
    return int(sign * m[n - 1, n - 1])


def count_radial_configs(net: Network) -> int:
    """Exact number of spanning trees of the supply-collapsed graph (matrix-tree theorem)."""
    reduced = _laplacian(net)[1:, 1:]
    return _bareiss_determinant(reduced)


def random_radial_config(net: Network, rng: np.random.Generator) -> RadialConfiguration:
    """Minimum spanning tree under random branch weights; radial but not uniform over trees."""
    weights = rng.random(net.n_branches)
    uf = UnionFind(range(net.n_vertices))
    closed = set()
    for idx in np.argsort(weights, kind="stable"):
        u, v = net.collapsed_endpoints[idx]
        if uf[u] == uf[v]:
            continue
        uf.union(u, v)
        closed.add(net.branches[idx].id)
    return RadialConfiguration(frozenset(b.id for b in net.branches if b.id not in closed))
