"""Failure and arrival selection for the churn workloads."""

import random

from ..config.schemas import FailureMode, FailureModeKind, TopologyKind
from ..overlay.graph import NodeId, OverlayGraph


def inter_cluster_links(g: OverlayGraph, node: NodeId, cluster_of: dict[NodeId, int]) -> int:
    home = cluster_of.get(node)
    return sum(1 for m in g.neighbors(node) if cluster_of.get(m) != home)


def select_failure_targets(
    g: OverlayGraph,
    mode: FailureMode,
    topo_kind: TopologyKind,
    cluster_of: dict[NodeId, int],
    rng: random.Random,
) -> list[NodeId]:
    """Nodes that fail this round.

    Random modes sample active nodes uniformly. A targeted attack picks the
    highest-degree nodes, or on clustered overlays the nodes with most
    inter-cluster links; ties go to the smaller id.
    """
    active = g.active_nodes()
    count = min(mode.events_per_round, len(active))
    if count == 0:
        return []

    if mode.kind is not FailureModeKind.TARGETED_ATTACK:
        return rng.sample(active, count)

    if topo_kind is TopologyKind.CLUSTERED:
        ranked = sorted(active, key=lambda n: (-inter_cluster_links(g, n, cluster_of), n))
    else:
        ranked = sorted(active, key=lambda n: (-g.degree(n), n))
    return ranked[:count]


def select_arrivals(g: OverlayGraph, count: int, rng: random.Random) -> list[NodeId]:
    """Inactive nodes that come back as new peers."""
    pool = g.inactive_nodes()
    return rng.sample(pool, min(count, len(pool)))
