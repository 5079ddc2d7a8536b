"""Round-based churn simulation driven by a LangGraph round pipeline."""

import logging
import math
import random
from collections.abc import Callable
from dataclasses import dataclass
from typing import TypedDict

import numpy as np
from langgraph.graph import END, StateGraph

from ..config.schemas import (
    FailureMode,
    MetricsRow,
    ProtocolKind,
    ProtocolParams,
    TopologyConfig,
)
from ..errors import OverlayError
from ..overlay.ecc import neighborhood_link_count
from ..overlay.graph import NodeId, OverlayGraph
from ..overlay.metrics import components, degree_std, isolated_count, neighborhood_stats
from ..overlay.view import LostNeighbor, ViewTable
from ..protocol.behavior import on_message, on_neighbor_failure, overgrown, periodic_prune, step_recovery
from ..protocol.messages import MessageKind, ProtocolMessage
from ..protocol.session import RecoverySession
from ..protocol.targets import TargetTracker
from ..topology.generators import GeneratedTopology
from ..topology.join import join_node
from .workload import select_arrivals, select_failure_targets

logger = logging.getLogger(__name__)


@dataclass
class RunStreams:
    """Independent random generators of one replicate."""
    topology: random.Random
    workload: random.Random
    join: random.Random
    protocol: random.Random


def derive_streams(seed: int) -> RunStreams:
    """Split a replicate seed into independent, reproducible streams."""
    states = np.random.SeedSequence(seed).generate_state(4)
    return RunStreams(*(random.Random(int(s)) for s in states))


class RoundState(TypedDict):
    """State flowing through the phases of one round."""
    round: int
    failed: list[NodeId]
    notifications: list[tuple[NodeId, NodeId]]
    messages_sent: int
    messages_dropped: int
    links_created: int
    links_removed: int
    divergent: bool
    row: MetricsRow | None


class ChurnSimulator:
    """One run: an overlay, a workload and a maintenance regime."""

    def __init__(
        self,
        topology: GeneratedTopology,
        topo_cfg: TopologyConfig,
        mode: FailureMode,
        params: ProtocolParams,
        kind: ProtocolKind,
        seed: int,
    ):
        self.graph = topology.graph
        self.cluster_of = topology.cluster_of
        self.topo_cfg = topo_cfg
        self.mode = mode
        self.kind = kind
        self.params = self._resolve_params(params)
        self.streams = derive_streams(seed)
        self.round = 0

        self.views = ViewTable(self.graph) if kind is not ProtocolKind.NONE else None
        self.sessions: dict[NodeId, RecoverySession] = {}
        self.queue: list[ProtocolMessage] = []
        self.targets = TargetTracker(self.params) if kind is ProtocolKind.PECC else None
        if self.targets is not None:
            self._record_samples()

        self.pipeline = self._build_graph()

    def _resolve_params(self, params: ProtocolParams) -> ProtocolParams:
        if params.threshold_degree is not None:
            return params
        active = self.graph.active_nodes()
        mean_degree = sum(self.graph.degree(n) for n in active) / max(1, len(active))
        threshold = max(1, math.ceil(params.threshold_factor * mean_degree))
        return params.model_copy(update={"threshold_degree": threshold})

    def _build_graph(self) -> StateGraph:
        """Build the round pipeline."""
        graph = StateGraph(RoundState)

        graph.add_node("fail_targets", self._fail_targets)
        graph.add_node("notify_failures", self._notify_failures)
        graph.add_node("join_arrivals", self._join_arrivals)
        graph.add_node("recover", self._recover)
        graph.add_node("prune_links", self._prune_links)
        graph.add_node("snapshot_metrics", self._snapshot_metrics)

        graph.set_entry_point("fail_targets")
        graph.add_edge("fail_targets", "notify_failures")
        graph.add_edge("notify_failures", "join_arrivals")
        graph.add_conditional_edges(
            "join_arrivals",
            self._after_join,
            {"recover": "recover", "snapshot_metrics": "snapshot_metrics"},
        )
        graph.add_conditional_edges(
            "recover",
            self._after_recover,
            {"prune_links": "prune_links", "snapshot_metrics": "snapshot_metrics"},
        )
        graph.add_edge("prune_links", "snapshot_metrics")
        graph.add_edge("snapshot_metrics", END)

        return graph.compile()

    def _after_join(self, state: RoundState) -> str:
        return "snapshot_metrics" if self.kind is ProtocolKind.NONE else "recover"

    def _after_recover(self, state: RoundState) -> str:
        return "prune_links" if self.kind is ProtocolKind.PECC else "snapshot_metrics"

    def fail_nodes(self, order: list[NodeId]) -> tuple[list[tuple[NodeId, NodeId]], int]:
        """Fail `order` in sequence; surviving neighbors keep what they knew before the round.

        Returns:
            (survivor, failed) notification pairs and the number of links removed
        """
        known: dict[tuple[NodeId, NodeId], LostNeighbor] = {}
        if self.views is not None:
            known = {
                (m, f): self.views[m].remember(f)
                for f in order
                for m in self.graph.neighbors(f)
            }

        notifications: list[tuple[NodeId, NodeId]] = []
        removed = 0
        for f in order:
            if self.views is not None:
                for m in sorted(self.graph.neighbors(f)):
                    self.views[m].detach(f, known[(m, f)])
                    notifications.append((m, f))
                self.views.drop(f)
            removed += len(self.graph.fail_node(f))
            self.sessions.pop(f, None)
            if self.targets is not None:
                self.targets.reset(f)
        return notifications, removed

    def _fail_targets(self, state: RoundState) -> dict:
        """Fail the selected nodes in a shuffled order."""
        targets = select_failure_targets(
            self.graph, self.mode, self.topo_cfg.kind, self.cluster_of, self.streams.workload
        )
        order = list(targets)
        self.streams.workload.shuffle(order)
        notifications, removed = self.fail_nodes(order)

        return {
            "failed": order,
            "notifications": notifications,
            "links_removed": state["links_removed"] + removed,
        }

    def _notify_failures(self, state: RoundState) -> dict:
        """Propagate the post-failure lists, then let each ex-neighbor react."""
        if self.views is None:
            return {}

        alive = [(m, f) for m, f in state["notifications"] if self.graph.is_active(m)]
        sent = 0
        for m in sorted({m for m, _ in alive}):
            sent += self.views.propagate(self.graph, m)

        rng = self.streams.protocol
        rng.shuffle(alive)
        for m, f in alive:
            view = self.views[m]
            session = on_neighbor_failure(m, f, view, self.params, self.kind, rng)
            view.lost.pop(f, None)
            if session is None:
                continue
            if m in self.sessions:
                self.sessions[m].merge(f, session.candidates)
            else:
                self.sessions[m] = session
                logger.debug("Node %d opens recovery for %d: %s", m, f, sorted(session.candidates))

        return {"messages_sent": state["messages_sent"] + sent}

    def _join_arrivals(self, state: RoundState) -> dict:
        """Bring back as many inactive nodes as failed this round."""
        if not self.mode.has_arrivals:
            return {}

        sent = 0
        for n in select_arrivals(self.graph, len(state["failed"]), self.streams.workload):
            linked = join_node(self.graph, self.topo_cfg, n, self.streams.join, self.cluster_of)
            if self.targets is not None:
                self.targets.reset(n)
            if self.views is not None:
                self.views.add(self.graph, n)
                sent += self.views.propagate(self.graph, n)
                for m in linked:
                    sent += self.views.propagate(self.graph, m)

        return {"messages_sent": state["messages_sent"] + sent}

    def _deliver(self, msg: ProtocolMessage, counts: dict) -> None:
        receiver = msg.receiver
        if not self.graph.is_active(receiver):
            counts["messages_dropped"] += 1
            logger.debug("Dropped %s from %d to inactive %d", msg.kind.value, msg.sender, receiver)
            session = self.sessions.get(msg.sender)
            if msg.kind is MessageKind.LINK_CREATION_REQUEST and session is not None:
                if session.pending_target == receiver:
                    session.pending_target = None
            return

        outcome = on_message(
            receiver, msg, self.views[receiver], self.sessions.get(receiver), self.params
        )
        for a, b in outcome.new_links:
            if self.graph.add_link(a, b):
                counts["links_created"] += 1
        self.queue.extend(outcome.replies)
        counts["messages_sent"] += len(outcome.replies)

    def _recover(self, state: RoundState) -> dict:
        """Run protocol ticks until every session closed and the queue drained."""
        counts = {
            "messages_sent": state["messages_sent"],
            "messages_dropped": state["messages_dropped"],
            "links_created": state["links_created"],
        }
        budget = self.params.message_budget_factor * max(1, self.graph.active_count())
        rng = self.streams.protocol
        divergent = False
        tick = 0

        while self.queue or self.sessions:
            tick += 1
            inbox, self.queue = self.queue, []
            rng.shuffle(inbox)
            for msg in inbox:
                self._deliver(msg, counts)

            owners = sorted(self.sessions)
            rng.shuffle(owners)
            for node in owners:
                session = self.sessions[node]
                request = step_recovery(session, self.views[node], self.params, tick, rng)
                if request is not None:
                    self.queue.append(request)
                    counts["messages_sent"] += 1
                if session.closed:
                    logger.debug(
                        "Node %d closes recovery for %d: %d of %d candidates requested",
                        node, session.failed, session.requests_sent, session.initial_size,
                    )
                    del self.sessions[node]

            if counts["messages_sent"] > budget:
                divergent = True
                logger.warning(
                    "Round %d exceeded the message budget (%d > %d); recovery cut short",
                    state["round"], counts["messages_sent"], budget,
                )
                self.queue.clear()
                self.sessions.clear()
                break

        # round boundary: lists delivered out of order within a tick may be stale
        for n in self.graph.active_nodes():
            self.views[n].sync(self.graph)
        return {**counts, "divergent": divergent}

    def prune_due(self, round_no: int) -> tuple[int, int]:
        """Let every P_ECC node due this round prune, then refresh its targets.

        With anchor_targets an overgrown node keeps its targets, so it keeps
        pruning on later checks instead of adopting its own growth.

        Returns:
            Links removed and neighbor-list messages sent
        """
        removed = 0
        sent = 0
        for node in self.graph.active_nodes():
            if not self.targets.is_due(node, round_no):
                continue
            current = self.targets.targets(node)
            over = current is not None and overgrown(node, self.graph, self.views[node], self.params, current)
            if self.params.prune_enabled and over:
                for a, b in periodic_prune(node, self.graph, self.views[node], self.params, current):
                    if self.graph.remove_link(a, b):
                        removed += 1
                        self.views[a].link_removed(b)
                        self.views[b].link_removed(a)
                        sent += self.views.propagate(self.graph, a)
                        sent += self.views.propagate(self.graph, b)
            if not (over and self.params.anchor_targets):
                self.targets.update_targets(node)
        return removed, sent

    def _prune_links(self, state: RoundState) -> dict:
        """Prune due P_ECC nodes and sample every node for the next windows."""
        removed, sent = self.prune_due(state["round"])
        self._record_samples()
        return {
            "links_removed": state["links_removed"] + removed,
            "messages_sent": state["messages_sent"] + sent,
        }

    def _record_samples(self) -> None:
        for node in self.graph.active_nodes():
            self.targets.record(node, self.graph.degree(node), neighborhood_link_count(self.graph, node))

    def _snapshot_metrics(self, state: RoundState) -> dict:
        """Measure the round's metrics."""
        if not self.graph.check_invariants():
            raise OverlayError(f"adjacency invariant broken in round {state['round']}")

        active = self.graph.active_count()
        sizes = components(self.graph)
        main = sizes[0] if sizes else 0
        avg_n1, avg_n2 = neighborhood_stats(self.graph)
        row = MetricsRow(
            round=state["round"],
            main_component_size=main,
            main_component_fraction=main / active if active else 0.0,
            isolated_count=isolated_count(self.graph),
            avg_n1=avg_n1,
            avg_n2=avg_n2,
            active_count=active,
            links_total=self.graph.link_count(),
            messages_sent=state["messages_sent"],
            degree_std=degree_std(self.graph),
            links_created=state["links_created"],
            links_removed=state["links_removed"],
            messages_dropped=state["messages_dropped"],
            divergent=state["divergent"],
        )
        logger.debug(
            "Round %d: active=%d main=%d isolated=%d messages=%d",
            row.round, row.active_count, row.main_component_size, row.isolated_count, row.messages_sent,
        )
        return {"row": row}

    @property
    def exhausted(self) -> bool:
        return self.graph.active_count() == 0

    def run_round(self) -> MetricsRow:
        """Simulate one round and return its metrics."""
        self.round += 1
        initial_state: RoundState = {
            "round": self.round,
            "failed": [],
            "notifications": [],
            "messages_sent": 0,
            "messages_dropped": 0,
            "links_created": 0,
            "links_removed": 0,
            "divergent": False,
            "row": None,
        }
        final_state = self.pipeline.invoke(initial_state)
        return final_state["row"]

    def run_to_completion(
        self,
        rounds: int,
        observer: Callable[["ChurnSimulator", MetricsRow], None] | None = None,
    ) -> list[MetricsRow]:
        """Run `rounds` rounds, or until no node is active in failures-only mode.

        Args:
            rounds: Number of rounds (ignored without arrivals)
            observer: Called after every round with the simulator and its row

        Returns:
            One MetricsRow per simulated round
        """
        rows: list[MetricsRow] = []
        while not self.exhausted:
            if self.mode.has_arrivals and self.round >= rounds:
                break
            row = self.run_round()
            rows.append(row)
            if observer is not None:
                observer(self, row)
        return rows
