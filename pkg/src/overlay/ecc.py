"""Edge clustering coefficient and neighborhood link counts."""

from dataclasses import dataclass

from ..errors import EdgeNotFoundError, InactiveNodeError
from .graph import Link, NodeId, OverlayGraph


@dataclass(frozen=True)
class EdgeEccRecord:
    """ECC of one edge together with the counts it was derived from."""
    endpoints: Link
    triangles: int
    ecc: float


def ecc_from_counts(triangles: int, degree_n: int, degree_m: int) -> float:
    """ECC for an edge given its triangle count and endpoint degrees.

    The coefficient is 0 when either endpoint has no other neighbor.
    """
    possible = min(degree_n - 1, degree_m - 1)
    if possible <= 0:
        return 0.0
    return triangles / possible


def ecc(g: OverlayGraph, n: NodeId, m: NodeId) -> EdgeEccRecord:
    """Compute ECC_{n,m} on the current graph.

    Args:
        g: Overlay graph
        n: First endpoint
        m: Second endpoint

    Returns:
        EdgeEccRecord for the ordered pair (n, m)
    """
    if not g.has_link(n, m):
        raise EdgeNotFoundError(f"nodes {n} and {m} are not linked")
    pi_n, pi_m = g.neighbors(n), g.neighbors(m)
    triangles = len(pi_n & pi_m)
    return EdgeEccRecord(
        endpoints=(n, m),
        triangles=triangles,
        ecc=ecc_from_counts(triangles, len(pi_n), len(pi_m)),
    )


def neighborhood_link_count(g: OverlayGraph, n: NodeId) -> int:
    """Number of distinct links with at least one endpoint in Π_n ∪ {n} (L_n)."""
    if not g.is_active(n):
        raise InactiveNodeError(f"node {n} is not active")
    closed = g.neighbors(n) | {n}
    # links inside the closed neighborhood are counted from both ends
    return sum(g.degree(u) for u in closed) - g.links_within(closed)
