"""Exception hierarchy for the overlay simulator."""


class OverlaySimError(Exception):
    """Base class for all simulator errors."""


class OverlayError(OverlaySimError):
    """Invalid operation on an overlay graph."""


class SelfLoopError(OverlayError):
    """A link from a node to itself was requested."""


class InactiveNodeError(OverlayError):
    """An operation referenced a node that is not active."""


class EdgeNotFoundError(OverlayError):
    """The queried pair of nodes is not linked."""


class TopologyError(OverlaySimError):
    """A topology cannot be generated from the given parameters."""


class ConfigError(OverlaySimError, ValueError):
    """Invalid run configuration.

    Attributes:
        key: Dotted name of the offending configuration key, if known
    """

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


class FitError(OverlaySimError):
    """A log-log fit is undefined for the given distribution."""
