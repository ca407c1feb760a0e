from collections import deque


class Trace:
    """Breadth-first walks over the closed branches of a network configuration.

    Two views are used: the supply-collapsed graph (all supply nodes merged into vertex 0),
    where radiality and loops are defined, and the physical graph, where the power flow runs.
    """

    @staticmethod
    def _bfs_traverse(start_ids, adjacency, visit_node):
        Q = deque((start_id, None, None) for start_id in start_ids)
        visited_nodes = set()

        while Q:
            current_id, parent_id, via_branch = Q.popleft()
            if current_id in visited_nodes:
                continue
            visited_nodes.add(current_id)
            visit_node(current_id, parent_id, via_branch)

            for next_id, branch_idx in adjacency.get(current_id, ()):
                if next_id in visited_nodes:
                    continue
                Q.append((next_id, current_id, branch_idx))

        return visited_nodes

    @classmethod
    def collapsed_adjacency(cls, net, open_ids, skip=None):
        adjacency = {}
        for idx, (u, v) in enumerate(net.collapsed_endpoints):
            branch_id = net.branches[idx].id
            if branch_id in open_ids or branch_id == skip or u == v:
                continue
            adjacency.setdefault(u, []).append((v, idx))
            adjacency.setdefault(v, []).append((u, idx))
        return adjacency

    @classmethod
    def physical_adjacency(cls, net, open_ids):
        adjacency = {}
        for idx, branch in enumerate(net.branches):
            if branch.id in open_ids:
                continue
            u = net.node_index[branch.from_id]
            v = net.node_index[branch.to_id]
            adjacency.setdefault(u, []).append((v, idx))
            adjacency.setdefault(v, []).append((u, idx))
        return adjacency

    @classmethod
    def tree_path(cls, net, open_ids, source, target):
        """Branch indices on the collapsed-tree path from vertex `source` to `target`.

        Returns None when the two vertices are not connected by closed branches.
        """
        if source == target:
            return []

        parents = {}

        def record(vertex, parent, via_branch):
            parents[vertex] = (parent, via_branch)

        cls._bfs_traverse([source], cls.collapsed_adjacency(net, open_ids), record)
        if target not in parents:
            return None

        path = []
        vertex = target
        while vertex != source:
            parent, via_branch = parents[vertex]
            path.append(via_branch)
            vertex = parent
        path.reverse()
        return path

    @classmethod
    def feeder_order(cls, net, open_ids):
        """Physical nodes in breadth-first order from the supply nodes.

        Each entry is (node_idx, parent_node_idx, branch_idx); supply nodes carry None for both.
        """
        order = []

        def collect(node_idx, parent_idx, via_branch):
            order.append((node_idx, parent_idx, via_branch))

        starts = [net.node_index[sid] for sid in net.ordered_supply_ids]
        cls._bfs_traverse(starts, cls.physical_adjacency(net, open_ids), collect)
        return order
