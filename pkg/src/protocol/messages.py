"""Messages exchanged by P_2n and P_ECC nodes."""

from dataclasses import dataclass
from enum import Enum

from ..overlay.graph import Link, NodeId


class MessageKind(str, Enum):
    LINK_CREATION_REQUEST = "link_creation_request"
    LINK_ACCEPT = "link_accept"
    LINK_REFUSE = "link_refuse"
    NOVEL_LINK_NOTIFY = "novel_link_notify"
    NEIGHBOR_LIST_UPDATE = "neighbor_list_update"


@dataclass(frozen=True)
class ProtocolMessage:
    """A point-to-point protocol message.

    `link` is set for novel-link notifications, as (sender, new neighbor).
    `neighbors` is set for neighbor-list updates.
    """
    kind: MessageKind
    sender: NodeId
    receiver: NodeId
    link: Link | None = None
    neighbors: frozenset[NodeId] | None = None


def request(sender: NodeId, receiver: NodeId) -> ProtocolMessage:
    return ProtocolMessage(MessageKind.LINK_CREATION_REQUEST, sender, receiver)


def accept(sender: NodeId, receiver: NodeId) -> ProtocolMessage:
    return ProtocolMessage(MessageKind.LINK_ACCEPT, sender, receiver)


def refuse(sender: NodeId, receiver: NodeId) -> ProtocolMessage:
    return ProtocolMessage(MessageKind.LINK_REFUSE, sender, receiver)


def novel_link(sender: NodeId, receiver: NodeId, new_neighbor: NodeId) -> ProtocolMessage:
    return ProtocolMessage(
        MessageKind.NOVEL_LINK_NOTIFY, sender, receiver, link=(sender, new_neighbor)
    )


def neighbor_list(sender: NodeId, receiver: NodeId, neighbors: frozenset[NodeId]) -> ProtocolMessage:
    return ProtocolMessage(
        MessageKind.NEIGHBOR_LIST_UPDATE, sender, receiver, neighbors=neighbors
    )
