"""Per-node knowledge of the 1st and 2nd neighborhood.

A node learns Π_m from the neighbor-list updates each neighbor m sends
whenever its own list changes. The last received list doubles as the cache
used to estimate the ECC of a link after its other endpoint has failed.
"""

from dataclasses import dataclass, field

from .ecc import ecc_from_counts
from .graph import NodeId, OverlayGraph


@dataclass(frozen=True)
class LostNeighbor:
    """What a node knew about a neighbor just before it failed."""
    neighbors: frozenset[NodeId]
    ecc: float


@dataclass
class NeighborView:
    """Local view of one node: Π_n plus the last list received from each neighbor."""
    owner: NodeId
    pi: set[NodeId] = field(default_factory=set)
    lists: dict[NodeId, frozenset[NodeId]] = field(default_factory=dict)
    lost: dict[NodeId, LostNeighbor] = field(default_factory=dict)

    @property
    def pi2_by(self) -> dict[NodeId, set[NodeId]]:
        """Π²_{n|m} = Π_m − Π_n − {n} for every neighbor m whose list is known."""
        excluded = self.pi | {self.owner}
        return {m: set(self.lists[m] - excluded) for m in self.pi if m in self.lists}

    @property
    def second_neighbors(self) -> set[NodeId]:
        """Π²_n, the union of the per-neighbor partitions."""
        reach: set[NodeId] = set()
        for m in self.pi:
            reach |= self.lists.get(m, frozenset())
        return reach - self.pi - {self.owner}

    def cached_ecc(self, m: NodeId) -> float:
        """ECC_{owner,m} estimated from the last list received from m."""
        known = self.lists.get(m, frozenset())
        return ecc_from_counts(len(self.pi & known), len(self.pi), len(known))

    def receive_list(self, m: NodeId, neighbors: frozenset[NodeId]) -> None:
        # may precede the accept that makes m a neighbor
        self.lists[m] = neighbors

    def link_added(self, m: NodeId) -> None:
        self.pi.add(m)

    def link_removed(self, m: NodeId) -> None:
        self.pi.discard(m)
        self.lists.pop(m, None)

    def remember(self, f: NodeId) -> LostNeighbor:
        """What this node knows about neighbor f right now."""
        return LostNeighbor(neighbors=self.lists.get(f, frozenset()), ecc=self.cached_ecc(f))

    def detach(self, f: NodeId, record: LostNeighbor | None = None) -> LostNeighbor:
        """Keep the pre-failure knowledge about f, then forget f as a neighbor.

        When several neighbors fail in the same round, `record` must be taken
        with remember() before the first of them is detached.
        """
        if record is None:
            record = self.remember(f)
        self.lost[f] = record
        self.link_removed(f)
        return record

    def sync(self, g: OverlayGraph) -> None:
        """Rebuild the view from the authoritative graph."""
        self.pi = set(g.neighbors(self.owner))
        self.lists = {m: g.neighbors(m) for m in self.pi}


class ViewTable:
    """Views of every active node of one run."""

    def __init__(self, g: OverlayGraph):
        self._views: dict[NodeId, NeighborView] = {}
        for n in g.active_nodes():
            self.add(g, n)

    def __getitem__(self, n: NodeId) -> NeighborView:
        return self._views[n]

    def __contains__(self, n: NodeId) -> bool:
        return n in self._views

    def add(self, g: OverlayGraph, n: NodeId) -> NeighborView:
        view = NeighborView(owner=n)
        view.sync(g)
        self._views[n] = view
        return view

    def drop(self, n: NodeId) -> None:
        self._views.pop(n, None)

    def propagate(self, g: OverlayGraph, n: NodeId) -> int:
        """Deliver n's current neighbor list to each of its neighbors.

        Returns:
            Number of neighbor-list update messages delivered
        """
        current = g.neighbors(n)
        if n in self._views:
            self._views[n].pi = set(current)
            self._views[n].lists = {
                m: self._views[n].lists.get(m, g.neighbors(m)) for m in current
            }
        for m in current:
            self._views[m].receive_list(n, current)
        return len(current)

    def consistent_with(self, g: OverlayGraph) -> bool:
        """True when every view matches the graph exactly."""
        for n in g.active_nodes():
            view = self._views.get(n)
            if view is None or view.pi != set(g.neighbors(n)):
                return False
            if any(view.lists.get(m) != g.neighbors(m) for m in view.pi):
                return False
        return True
