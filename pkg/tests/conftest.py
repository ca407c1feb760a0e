import itertools

import networkx as nx
import pytest
from networkx.utils import UnionFind

from opisd_bench.modules.network import parse_network


def network_document(edges, supplies=("S",), r=0.01, x=0.02, p=0.01, q=0.005,
                     v_min=0.9, v_max=1.1, i_max=None, loads=None):
    """Network JSON document over `edges`; the initial open set is the co-tree of a greedy spanning tree.

    An edge is `(from, to)` or `(from, to, r, x)`; branches are named b1, b2, ... in edge order.
    """
    loads = loads or {}
    node_ids = list(supplies)
    for edge in edges:
        for node_id in edge[:2]:
            if node_id not in node_ids:
                node_ids.append(node_id)

    root = supplies[0]
    uf = UnionFind(node_ids)
    for supply in supplies[1:]:
        uf.union(root, supply)

    branches = []
    for k, edge in enumerate(edges, start=1):
        u, v = edge[:2]
        r_b, x_b = (edge[2], edge[3]) if len(edge) == 4 else (r, x)
        is_open = uf[u] == uf[v]
        if not is_open:
            uf.union(u, v)
        branch = {"id": f"b{k}", "from": u, "to": v, "r_pu": r_b, "x_pu": x_b, "initially_open": is_open}
        if i_max is not None:
            branch["i_max_pu"] = i_max
        branches.append(branch)

    nodes = []
    for node_id in node_ids:
        if node_id in supplies:
            nodes.append({"id": node_id, "kind": "supply", "v_min": v_min, "v_max": v_max})
        else:
            p_load, q_load = loads.get(node_id, (p, q))
            nodes.append({"id": node_id, "kind": "load", "p_pu": p_load, "q_pu": q_load,
                          "v_min": v_min, "v_max": v_max})

    return {"base_power_kVA": 10.0, "base_voltage_kV": 12.66, "nodes": nodes, "branches": branches}


def build_network(edges, **kwargs):
    return parse_network(network_document(edges, **kwargs))


def ring_edges(n):
    """Cycle S-1-...-(n-1)-S on n nodes."""
    names = ["S"] + [str(i) for i in range(1, n)]
    return [(names[i], names[(i + 1) % n]) for i in range(n)]


def random_connected_edges(n_nodes, n_extra, seed):
    """Random spanning tree on n_nodes plus n_extra random extra edges (parallel edges allowed)."""
    graph = nx.random_labeled_tree(n_nodes, seed=seed) if hasattr(nx, "random_labeled_tree") else nx.random_tree(n_nodes, seed=seed)
    names = ["S"] + [str(i) for i in range(1, n_nodes)]
    edges = [(names[u], names[v]) for u, v in sorted(graph.edges())]
    pairs = list(itertools.combinations(range(n_nodes), 2))
    rng = nx.utils.create_py_random_state(seed)
    for _ in range(n_extra):
        u, v = rng.choice(pairs)
        edges.append((names[u], names[v]))
    return edges


def brute_force_radial(net):
    """All open sets of size A whose closed branches form a spanning tree, by networkx."""
    vertices = range(net.n_vertices)
    found = []
    for open_ids in itertools.combinations([b.id for b in net.branches], net.n_open):
        graph = nx.MultiGraph()
        graph.add_nodes_from(vertices)
        for branch, (u, v) in zip(net.branches, net.collapsed_endpoints):
            if branch.id not in open_ids:
                graph.add_edge(u, v)
        if nx.is_tree(graph):
            found.append(frozenset(open_ids))
    return found


# a small meshed feeder: two loops, 24 radial configurations
MESH_EDGES = [
    ("S", "1"), ("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"),
    ("1", "6"), ("6", "7"), ("7", "8"),
    ("5", "8"), ("3", "7"),
]

# two feeders joined by a tie between the substations and two load ties
TWO_FEEDER_EDGES = [
    ("S1", "a1"), ("a1", "a2"), ("a2", "a3"),
    ("S2", "b1"), ("b1", "b2"), ("b2", "b3"),
    ("S1", "S2"), ("a3", "b3"), ("a2", "b2"),
]


@pytest.fixture
def ring4():
    return build_network(ring_edges(4))


@pytest.fixture
def chain5():
    return build_network([("S", "1"), ("1", "2"), ("2", "3"), ("3", "4")])


@pytest.fixture
def mesh():
    return build_network(MESH_EDGES, p=0.02, q=0.01)


@pytest.fixture
def two_feeder():
    return build_network(TWO_FEEDER_EDGES, supplies=("S1", "S2"))


# 15-node feeder with three laterals and three ties, 180 radial configurations
FEEDER15_EDGES = [
    ("S", "1"), ("1", "2"), ("2", "3"), ("3", "4"), ("4", "5"), ("5", "6"),
    ("2", "7"), ("7", "8"), ("8", "9"),
    ("4", "10"), ("10", "11"), ("11", "12"),
    ("6", "13"), ("13", "14"),
    ("9", "12"), ("12", "14"), ("3", "8"),
]


@pytest.fixture(scope="module")
def feeder15():
    return build_network(FEEDER15_EDGES, p=0.02, q=0.01)
