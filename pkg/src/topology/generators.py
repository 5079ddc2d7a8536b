"""Initial overlay construction: uniform, clustered and scale-free."""

import logging
import math
import random
from dataclasses import dataclass, field

import networkx as nx

from ..config.schemas import TopologyConfig, TopologyKind
from ..errors import TopologyError
from ..overlay.graph import NodeId, OverlayGraph

logger = logging.getLogger(__name__)


@dataclass
class GeneratedTopology:
    """An initial overlay plus the cluster membership used by joins and attacks."""
    graph: OverlayGraph
    cluster_of: dict[NodeId, int] = field(default_factory=dict)


def generate_uniform(cfg: TopologyConfig, rng: random.Random) -> OverlayGraph:
    """Random regular overlay where every node has degree cfg.uniform_degree."""
    n, d = cfg.n_nodes, cfg.uniform_degree
    if d < 1 or d >= n:
        raise TopologyError(f"uniform_degree must be in [1, {n - 1}], got {d}")
    if (n * d) % 2:
        raise TopologyError(f"n_nodes * uniform_degree must be even, got {n} * {d}")
    try:
        wiring = nx.random_regular_graph(d, n, seed=rng)
    except nx.NetworkXError as e:
        raise TopologyError(f"cannot wire a {d}-regular overlay on {n} nodes: {e}") from e
    return OverlayGraph.from_networkx(wiring, n)


def cluster_members(cfg: TopologyConfig) -> list[list[NodeId]]:
    """Node ids of each equally sized cluster, in cluster order."""
    if cfg.n_nodes % cfg.n_clusters:
        raise TopologyError(
            f"n_nodes ({cfg.n_nodes}) must be divisible by n_clusters ({cfg.n_clusters})"
        )
    size = cfg.n_nodes // cfg.n_clusters
    return [list(range(c * size, (c + 1) * size)) for c in range(cfg.n_clusters)]


def generate_clustered(
    cfg: TopologyConfig, rng: random.Random
) -> tuple[OverlayGraph, dict[NodeId, int]]:
    """Equally sized G(n, γ) clusters joined by ω-probability inter-cluster links."""
    clusters = cluster_members(cfg)
    graph = OverlayGraph(cfg.n_nodes)
    cluster_of: dict[NodeId, int] = {}

    for index, members in enumerate(clusters):
        interior = nx.gnp_random_graph(len(members), cfg.gamma, seed=rng)
        for a, b in interior.edges():
            graph.add_link(members[a], members[b])
        cluster_of.update({n: index for n in members})

    for n in range(cfg.n_nodes):
        for index, members in enumerate(clusters):
            if index != cluster_of[n] and rng.random() < cfg.omega:
                graph.add_link(n, rng.choice(members))

    return graph, cluster_of


def aiello_degree_sequence(a: float, b: float) -> list[int]:
    """Degree sequence with ⌊e^a / d^b⌋ nodes of degree d, d = 1..⌊e^(a/b)⌋."""
    if b <= 0:
        raise TopologyError(f"b must be positive, got {b}")
    max_degree = math.floor(math.exp(a / b))
    sequence = [
        d
        for d in range(1, max_degree + 1)
        for _ in range(math.floor(math.exp(a) / d ** b))
    ]
    if not sequence:
        raise TopologyError(f"a={a}, b={b} produce no nodes")
    return sequence


def generate_scale_free(cfg: TopologyConfig, rng: random.Random) -> OverlayGraph:
    """Aiello-Chung-Lu power-law overlay realized by random stub matching.

    Self-loops and duplicate edges are discarded, so realized degrees may fall
    short of the drawn ones.
    """
    sequence = aiello_degree_sequence(cfg.a, cfg.b)
    if sum(sequence) % 2:
        # one stub has no partner; drop it from a random node
        sequence[rng.randrange(len(sequence))] -= 1

    matched = nx.configuration_model(sequence, seed=rng)
    simple = nx.Graph(matched)
    simple.remove_edges_from(list(nx.selfloop_edges(simple)))
    logger.debug(
        "Scale-free overlay: %d nodes, %d stubs, %d links after cleanup",
        len(sequence), sum(sequence), simple.number_of_edges(),
    )
    return OverlayGraph.from_networkx(simple, len(sequence))


def generate(cfg: TopologyConfig, rng: random.Random) -> GeneratedTopology:
    """Build the overlay selected by cfg.kind."""
    if cfg.kind is TopologyKind.UNIFORM:
        return GeneratedTopology(graph=generate_uniform(cfg, rng))
    if cfg.kind is TopologyKind.CLUSTERED:
        graph, cluster_of = generate_clustered(cfg, rng)
        return GeneratedTopology(graph=graph, cluster_of=cluster_of)
    return GeneratedTopology(graph=generate_scale_free(cfg, rng))
