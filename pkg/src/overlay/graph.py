"""Dynamic undirected overlay graph with per-node active state."""

from collections.abc import Iterator
from pathlib import Path

import networkx as nx

from ..errors import InactiveNodeError, OverlayError, SelfLoopError

NodeId = int
Link = tuple[NodeId, NodeId]


class OverlayGraph:
    """Overlay over a dense id space 0..node_count-1.

    Inactive nodes keep their id and have no links, so a failed node can be
    reused for a later arrival.
    """

    def __init__(self, node_count: int, active: bool = True):
        if node_count < 0:
            raise OverlayError("node_count must be non-negative")
        self._graph = nx.Graph()
        self._graph.add_nodes_from(range(node_count))
        self._active = [active] * node_count

    @classmethod
    def from_networkx(cls, graph: nx.Graph, node_count: int | None = None) -> "OverlayGraph":
        """Build an all-active overlay from a networkx graph labelled 0..N-1."""
        size = graph.number_of_nodes() if node_count is None else node_count
        overlay = cls(size)
        for a, b in graph.edges():
            if a != b:
                overlay.add_link(int(a), int(b))
        return overlay

    @property
    def node_count(self) -> int:
        return len(self._active)

    def is_active(self, n: NodeId) -> bool:
        return 0 <= n < len(self._active) and self._active[n]

    def active_nodes(self) -> list[NodeId]:
        return [n for n, alive in enumerate(self._active) if alive]

    def inactive_nodes(self) -> list[NodeId]:
        return [n for n, alive in enumerate(self._active) if not alive]

    def active_count(self) -> int:
        return sum(self._active)

    def neighbors(self, n: NodeId) -> frozenset[NodeId]:
        return frozenset(self._graph.adj[n])

    def degree(self, n: NodeId) -> int:
        return len(self._graph.adj[n])

    def has_link(self, a: NodeId, b: NodeId) -> bool:
        return self._graph.has_edge(a, b)

    def link_count(self) -> int:
        return self._graph.number_of_edges()

    def links_within(self, nodes: frozenset[NodeId]) -> int:
        """Number of links with both endpoints in `nodes`."""
        return sum(len(self._graph.adj[u].keys() & nodes) for u in nodes) // 2

    def links(self) -> Iterator[Link]:
        """Yield every link once as an ordered (small, large) pair, sorted."""
        yield from sorted((min(a, b), max(a, b)) for a, b in self._graph.edges())

    def _require_active(self, n: NodeId) -> None:
        if not self.is_active(n):
            raise InactiveNodeError(f"node {n} is not active")

    def add_link(self, a: NodeId, b: NodeId) -> bool:
        """Link two active nodes.

        Returns:
            True if the link is new, False if it already existed
        """
        if a == b:
            raise SelfLoopError(f"self-loop on node {a}")
        self._require_active(a)
        self._require_active(b)
        if self._graph.has_edge(a, b):
            return False
        self._graph.add_edge(a, b)
        return True

    def remove_link(self, a: NodeId, b: NodeId) -> bool:
        """Remove a link; returns False if it did not exist."""
        if not self._graph.has_edge(a, b):
            return False
        self._graph.remove_edge(a, b)
        return True

    def fail_node(self, f: NodeId) -> list[Link]:
        """Deactivate a node and drop all its links.

        Returns:
            Removed links as (f, neighbor) pairs in neighbor order
        """
        self._require_active(f)
        removed = [(f, m) for m in sorted(self._graph.adj[f])]
        self._graph.remove_edges_from(removed)
        self._active[f] = False
        return removed

    def activate(self, n: NodeId) -> None:
        """Bring an inactive node back with no links."""
        if self.is_active(n):
            raise OverlayError(f"node {n} is already active")
        if not 0 <= n < len(self._active):
            raise OverlayError(f"node {n} is outside the id space")
        self._active[n] = True

    def check_invariants(self) -> bool:
        """Verify the adjacency invariants (no self-loops, inactive nodes bare)."""
        if nx.number_of_selfloops(self._graph):
            return False
        return all(self.degree(n) == 0 for n in self.inactive_nodes())

    def to_networkx(self, active_only: bool = True) -> nx.Graph:
        """Return a networkx view of the overlay (a read-only subgraph view)."""
        if active_only:
            return self._graph.subgraph(self.active_nodes())
        return self._graph.copy(as_view=True)

    def copy(self) -> "OverlayGraph":
        clone = OverlayGraph(0)
        clone._graph = self._graph.copy()
        clone._active = list(self._active)
        return clone

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OverlayGraph):
            return NotImplemented
        return self._active == other._active and list(self.links()) == list(other.links())


def write_edge_list(graph: OverlayGraph, path: str | Path, round_no: int) -> None:
    """Export the overlay as a `u v` edge list with a summary header.

    The header names the inactive ids, so isolated active nodes survive a reload.
    """
    header = f"# nodes={graph.node_count} active={graph.active_count()} round={round_no}"
    inactive = graph.inactive_nodes()
    if inactive:
        header += f" inactive={','.join(map(str, inactive))}"
    with open(path, "w", encoding="utf-8") as f:
        f.write(header + "\n")
        for a, b in graph.links():
            f.write(f"{a} {b}\n")


def read_edge_list(path: str | Path) -> tuple[OverlayGraph, int]:
    """Load an edge list written by write_edge_list.

    Returns:
        The graph and the round recorded in the header
    """
    with open(path, "r", encoding="utf-8") as f:
        header = f.readline().strip()
        fields = dict(item.split("=", 1) for item in header.lstrip("# ").split())
        links: list[Link] = [tuple(map(int, line.split())) for line in f if line.strip()]

    graph = OverlayGraph(int(fields["nodes"]))
    for n in sorted({int(n) for n in fields.get("inactive", "").split(",") if n}):
        graph.fail_node(n)
    if graph.active_count() != int(fields["active"]):
        raise OverlayError(f"{path}: header lists {fields['active']} active nodes, found {graph.active_count()}")
    for a, b in links:
        graph.add_link(a, b)
    return graph, int(fields["round"])
