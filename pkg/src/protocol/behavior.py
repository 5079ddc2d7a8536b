"""Node behavior of the none, P_2n and P_ECC maintenance regimes.

Handlers are transition functions: they mutate only the node's own view and
session and return the messages to send and the links to create. The
simulation engine owns delivery order and the authoritative graph.
"""

import logging
import math
import random
from dataclasses import dataclass, field

from ..config.schemas import ProtocolKind, ProtocolParams
from ..overlay.ecc import ecc, neighborhood_link_count
from ..overlay.graph import Link, NodeId, OverlayGraph
from ..overlay.view import NeighborView
from . import messages
from .messages import MessageKind, ProtocolMessage
from .session import RecoverySession

logger = logging.getLogger(__name__)


@dataclass
class MessageOutcome:
    """Result of handling one message."""
    new_links: list[Link] = field(default_factory=list)
    replies: list[ProtocolMessage] = field(default_factory=list)


def degree_cap(params: ProtocolParams) -> float:
    return math.inf if params.threshold_degree is None else params.threshold_degree


def _backoff(now: int, params: ProtocolParams, rng: random.Random) -> int:
    return now + rng.randint(1, params.backoff_max)


def on_neighbor_failure(
    node: NodeId,
    f: NodeId,
    view: NeighborView,
    params: ProtocolParams,
    kind: ProtocolKind,
    rng: random.Random,
    now: int = 0,
) -> RecoverySession | None:
    """Active behavior of `node` once it learns that neighbor f failed.

    The view must already have detached f (see NeighborView.detach) and hold
    the neighbor lists updated after the failure.

    Args:
        node: Node reacting to the failure
        f: Failed neighbor
        view: Local view of `node`
        params: Protocol parameters
        kind: Maintenance regime
        rng: Protocol random generator
        now: Current protocol tick

    Returns:
        A new session, or None when there is nothing to repair
    """
    if kind is ProtocolKind.NONE:
        return None
    lost = view.lost.get(f)
    if lost is None:
        return None

    second = view.second_neighbors
    candidates = {
        p for p in lost.neighbors
        if p != node and p not in view.pi and p not in second
    }
    if not candidates:
        return None

    # a draw is only needed when the gate can actually close
    if kind is ProtocolKind.PECC and params.ecc_gate_enabled and lost.ecc > 0:
        if rng.random() <= lost.ecc:
            logger.debug("Node %d skips repair of %d (ECC %.3f)", node, f, lost.ecc)
            return None

    return RecoverySession(
        owner=node,
        failed=f,
        candidates=candidates,
        backoff_until=_backoff(now, params, rng),
        initial_size=len(candidates),
    )


def step_recovery(
    session: RecoverySession,
    view: NeighborView,
    params: ProtocolParams,
    now: int,
    rng: random.Random,
) -> ProtocolMessage | None:
    """Advance a session by one tick; may emit a link-creation request."""
    if session.closed or session.pending_target is not None or now < session.backoff_until:
        return None
    if not session.candidates or len(view.pi) > degree_cap(params):
        session.closed = True
        return None

    target = rng.choice(sorted(session.candidates))
    session.candidates.remove(target)
    session.pending_target = target
    session.requests_sent += 1
    session.backoff_until = _backoff(now, params, rng)
    return messages.request(session.owner, target)


def _announce(node: NodeId, p: NodeId, view: NeighborView) -> list[ProtocolMessage]:
    """Notify neighbors of the novel link (node, p), then add p and share the new list."""
    notes = [messages.novel_link(node, q, p) for q in sorted(view.pi - {p})]
    view.link_added(p)
    current = frozenset(view.pi)
    return notes + [messages.neighbor_list(node, q, current) for q in sorted(current)]


def on_message(
    node: NodeId,
    msg: ProtocolMessage,
    view: NeighborView,
    session: RecoverySession | None,
    params: ProtocolParams,
) -> MessageOutcome:
    """Passive behavior of `node` on receiving a protocol message."""
    outcome = MessageOutcome()
    sender = msg.sender

    if msg.kind is MessageKind.LINK_ACCEPT:
        if session is not None and session.pending_target == sender:
            session.pending_target = None
        outcome.new_links.append((node, sender))
        if sender not in view.pi:
            outcome.replies.extend(_announce(node, sender, view))

    elif msg.kind is MessageKind.LINK_REFUSE:
        if session is not None and session.pending_target == sender:
            session.pending_target = None

    elif msg.kind is MessageKind.LINK_CREATION_REQUEST:
        if sender in view.pi:
            logger.debug("Node %d refuses %d: already a first neighbor", node, sender)
            outcome.replies.append(messages.refuse(node, sender))
        elif sender in view.second_neighbors:
            outcome.replies.append(messages.refuse(node, sender))
        else:
            outcome.replies.append(messages.accept(node, sender))
            outcome.new_links.append((node, sender))
            outcome.replies.extend(_announce(node, sender, view))
            if session is not None:
                session.discard(sender)

    elif msg.kind is MessageKind.NOVEL_LINK_NOTIFY:
        if session is not None and msg.link is not None and sender in view.pi:
            session.discard(msg.link[1])

    elif msg.kind is MessageKind.NEIGHBOR_LIST_UPDATE:
        if msg.neighbors is not None:
            view.receive_list(sender, msg.neighbors)

    return outcome


def overgrown(
    node: NodeId,
    g: OverlayGraph,
    view: NeighborView,
    params: ProtocolParams,
    targets: tuple[int, int],
) -> bool:
    """True when both the degree and L_n exceed growth_factor times their targets."""
    target_degree, target_links = targets
    if len(view.pi) <= params.growth_factor * target_degree:
        return False
    return neighborhood_link_count(g, node) > params.growth_factor * target_links


def periodic_prune(
    node: NodeId,
    g: OverlayGraph,
    view: NeighborView,
    params: ProtocolParams,
    targets: tuple[int, int],
) -> list[Link]:
    """Links a P_ECC node drops when its degree and L_n outgrew their targets.

    Returns:
        Up to r incident links with ECC above T_ECC, highest ECC first,
        ties broken by the smaller neighbor id
    """
    if not overgrown(node, g, view, params, targets):
        return []

    scored = [(ecc(g, node, m).ecc, m) for m in sorted(view.pi) if g.has_link(node, m)]
    eligible = sorted((item for item in scored if item[0] > params.t_ecc), key=lambda s: (-s[0], s[1]))
    return [(node, m) for _, m in eligible[: params.r]]
