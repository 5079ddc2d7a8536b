"""Windowed degree and neighborhood-link targets of P_ECC nodes."""

import math
from collections import deque
from collections.abc import Iterable

import numpy as np

from ..config.schemas import ProtocolParams
from ..overlay.graph import NodeId

Sample = tuple[int, int]


def window_targets(history: Iterable[Sample], window: int) -> tuple[int, int]:
    """Mean degree and mean L_n over the last `window` samples, rounded half up."""
    recent = list(history)[-window:]
    if not recent:
        raise ValueError("at least one sample is required")
    degree_mean, links_mean = np.mean(np.array(recent, dtype=float), axis=0)
    return math.floor(degree_mean + 0.5), math.floor(links_mean + 0.5)


class TargetTracker:
    """Per-node (degree, L_n) history and the targets derived from it."""

    def __init__(self, params: ProtocolParams):
        self.params = params
        self._history: dict[NodeId, deque[Sample]] = {}
        self._targets: dict[NodeId, tuple[int, int]] = {}

    def record(self, node: NodeId, degree: int, links: int) -> None:
        samples = self._history.setdefault(node, deque(maxlen=self.params.target_window))
        samples.append((degree, links))
        if node not in self._targets:
            self._targets[node] = (degree, links)

    def reset(self, node: NodeId) -> None:
        """Forget a node (it failed, or rejoined as a new peer)."""
        self._history.pop(node, None)
        self._targets.pop(node, None)

    def targets(self, node: NodeId) -> tuple[int, int] | None:
        return self._targets.get(node)

    def update_targets(self, node: NodeId) -> tuple[int, int] | None:
        """Refresh a node's targets from its window of samples."""
        history = self._history.get(node)
        if not history:
            return None
        self._targets[node] = window_targets(history, self.params.target_window)
        return self._targets[node]

    def is_due(self, node: NodeId, round_no: int) -> bool:
        return (round_no + node) % self.params.target_check_period == 0
