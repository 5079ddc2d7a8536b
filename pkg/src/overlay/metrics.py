"""Connectivity and neighborhood metrics over the active part of an overlay."""

from collections import Counter

import networkx as nx
import numpy as np

from .graph import NodeId, OverlayGraph


def components(g: OverlayGraph) -> list[int]:
    """Sizes of connected components of active nodes, largest first."""
    sizes = (len(c) for c in nx.connected_components(g.to_networkx()))
    return sorted(sizes, reverse=True)


def isolated_count(g: OverlayGraph) -> int:
    return sum(1 for n in g.active_nodes() if g.degree(n) == 0)


def second_neighbors(g: OverlayGraph, n: NodeId) -> set[NodeId]:
    """Nodes at distance exactly 2 from n."""
    first = g.neighbors(n)
    reach: set[NodeId] = set()
    for m in first:
        reach |= g.neighbors(m)
    return reach - first - {n}


def neighborhood_stats(g: OverlayGraph) -> tuple[float, float]:
    """Mean |Π_n| and mean |Π²_n| over active nodes (0, 0 when none are active)."""
    active = g.active_nodes()
    if not active:
        return 0.0, 0.0
    n1 = sum(g.degree(n) for n in active)
    n2 = sum(len(second_neighbors(g, n)) for n in active)
    return n1 / len(active), n2 / len(active)


def degree_std(g: OverlayGraph) -> float:
    degrees = [g.degree(n) for n in g.active_nodes()]
    return float(np.std(degrees)) if degrees else 0.0


def degree_distribution(g: OverlayGraph) -> dict[int, float]:
    """Empirical degree distribution of active nodes, keyed by degree."""
    active = g.active_nodes()
    if not active:
        return {}
    counts = Counter(g.degree(n) for n in active)
    return {d: counts[d] / len(active) for d in sorted(counts)}
