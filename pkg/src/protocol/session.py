"""In-flight repair state of a node."""

from dataclasses import dataclass, field

from ..overlay.graph import NodeId


@dataclass
class RecoverySession:
    """Candidates a node still has to reconnect to after a neighbor failure.

    At most one link-creation request is pending at a time.
    """
    owner: NodeId
    failed: NodeId
    candidates: set[NodeId] = field(default_factory=set)
    pending_target: NodeId | None = None
    backoff_until: int = 0
    requests_sent: int = 0
    initial_size: int = 0
    closed: bool = False

    def merge(self, failed: NodeId, candidates: set[NodeId]) -> None:
        """Fold the candidates of a further neighbor failure into this session."""
        self.failed = failed
        fresh = candidates - self.candidates - {self.pending_target}
        self.candidates |= fresh
        self.initial_size += len(fresh)

    def discard(self, node: NodeId) -> None:
        """Drop a candidate that is now reachable; cancel it if pending."""
        self.candidates.discard(node)
        if self.pending_target == node:
            self.pending_target = None
