"""Topology-preserving join procedures for node arrivals."""

import random

from ..config.schemas import TopologyConfig, TopologyKind
from ..overlay.graph import NodeId, OverlayGraph


def preferential_attachment_targets(
    degrees: dict[NodeId, int], k: int, rng: random.Random
) -> list[NodeId]:
    """Draw up to k distinct nodes with probability proportional to degree.

    Draws are sequential without replacement. When every remaining candidate
    has degree 0 the draw falls back to uniform.

    Args:
        degrees: Candidate nodes and their current degree
        k: Number of targets wanted
        rng: Random generator

    Returns:
        Chosen nodes in draw order
    """
    remaining = sorted(degrees)
    chosen: list[NodeId] = []
    while remaining and len(chosen) < k:
        weights = [degrees[n] for n in remaining]
        if sum(weights) > 0:
            pick = rng.choices(remaining, weights=weights)[0]
        else:
            pick = rng.choice(remaining)
        chosen.append(pick)
        remaining.remove(pick)
    return chosen


def scale_free_fanout(g: OverlayGraph, cfg: TopologyConfig) -> int:
    """Links created by a preferential-attachment join."""
    if cfg.join_fanout is not None:
        return cfg.join_fanout
    active = g.active_nodes()
    if not active:
        return 1
    return max(1, round(sum(g.degree(n) for n in active) / len(active)))


def join_node(
    g: OverlayGraph,
    cfg: TopologyConfig,
    node: NodeId,
    rng: random.Random,
    cluster_of: dict[NodeId, int] | None = None,
) -> list[NodeId]:
    """Activate an inactive node and wire it the way its topology family grows.

    Args:
        g: Overlay graph (modified in place)
        cfg: Topology configuration of the run
        node: Inactive node that arrives
        rng: Random generator for the wiring
        cluster_of: Cluster index per node (clustered topologies)

    Returns:
        The neighbors the node was linked to
    """
    fanout = scale_free_fanout(g, cfg) if cfg.kind is TopologyKind.SCALE_FREE else 0
    candidates = g.active_nodes()
    g.activate(node)

    if cfg.kind is TopologyKind.UNIFORM:
        targets = rng.sample(candidates, min(cfg.uniform_degree, len(candidates)))
    elif cfg.kind is TopologyKind.CLUSTERED:
        targets = _clustered_targets(cfg, node, candidates, rng, cluster_of or {})
    else:
        degrees = {n: g.degree(n) for n in candidates}
        targets = preferential_attachment_targets(degrees, fanout, rng)

    for target in targets:
        g.add_link(node, target)
    return sorted(set(targets))


def _clustered_targets(
    cfg: TopologyConfig,
    node: NodeId,
    candidates: list[NodeId],
    rng: random.Random,
    cluster_of: dict[NodeId, int],
) -> list[NodeId]:
    home = cluster_of.get(node, node % cfg.n_clusters)
    by_cluster: dict[int, list[NodeId]] = {}
    for n in candidates:
        by_cluster.setdefault(cluster_of.get(n, n % cfg.n_clusters), []).append(n)

    targets = [n for n in by_cluster.get(home, []) if rng.random() < cfg.gamma]
    for index in sorted(by_cluster):
        if index != home and rng.random() < cfg.omega:
            targets.append(rng.choice(by_cluster[index]))
    return targets
