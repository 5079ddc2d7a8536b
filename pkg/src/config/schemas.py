"""Pydantic schemas for run configuration and per-round metrics."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator, model_validator


class TopologyKind(str, Enum):
    """Initial overlay family."""
    UNIFORM = "uniform"
    CLUSTERED = "clustered"
    SCALE_FREE = "scale_free"


class FailureModeKind(str, Enum):
    """Churn workload."""
    EVOLUTION = "evolution"
    TARGETED_ATTACK = "targeted_attack"
    FAILURES_ONLY = "failures_only"


class ProtocolKind(str, Enum):
    """Maintenance regime run by every node."""
    NONE = "none"
    P2N = "p2n"
    PECC = "pecc"


class TopologyConfig(BaseModel):
    """Parameters of the initial overlay and of the join procedure."""
    model_config = ConfigDict(extra="forbid")

    kind: TopologyKind = Field(default=TopologyKind.UNIFORM)
    n_nodes: int = Field(
        default=200,
        ge=1,
        description="Number of nodes (ignored for scale_free, derived from a and b)",
    )
    uniform_degree: int = Field(
        default=4,
        ge=1,
        validate_default=True,
        description="Degree of every node (uniform only)",
    )
    n_clusters: int = Field(
        default=8,
        ge=1,
        validate_default=True,
        description="Number of equally sized clusters",
    )
    gamma: float = Field(default=0.2, ge=0.0, le=1.0, description="Intra-cluster link probability")
    omega: float = Field(
        default=0.02,
        ge=0.0,
        le=1.0,
        description="Probability that a node links to each external cluster",
    )
    a: float = Field(default=6.0, ge=0.0, description="Aiello model log-size parameter")
    b: float = Field(default=2.0, gt=0.0, description="Aiello model power-law exponent")
    join_fanout: int | None = Field(
        default=None,
        ge=1,
        description="Links created by a scale-free join; unset means the rounded mean degree",
    )
    seed: int = Field(default=0, ge=0, description="Seed of the topology generator")

    @field_validator("uniform_degree")
    @classmethod
    def _check_uniform_degree(cls, value: int, info: ValidationInfo) -> int:
        if info.data.get("kind") is not TopologyKind.UNIFORM or "n_nodes" not in info.data:
            return value
        n_nodes = info.data["n_nodes"]
        if value >= n_nodes:
            raise ValueError(f"must be smaller than n_nodes ({n_nodes})")
        if value * n_nodes % 2:
            raise ValueError(f"n_nodes * uniform_degree must be even, got {n_nodes} * {value}")
        return value

    @field_validator("n_clusters")
    @classmethod
    def _check_cluster_split(cls, value: int, info: ValidationInfo) -> int:
        if info.data.get("kind") is not TopologyKind.CLUSTERED or "n_nodes" not in info.data:
            return value
        if info.data["n_nodes"] % value:
            raise ValueError(f"must divide n_nodes ({info.data['n_nodes']}) evenly")
        return value


class FailureMode(BaseModel):
    """Failure workload and its intensity."""
    model_config = ConfigDict(extra="forbid")

    kind: FailureModeKind = Field(default=FailureModeKind.EVOLUTION)
    events_per_round: int = Field(default=1, ge=1, description="Failures (and arrivals) per round")

    @property
    def has_arrivals(self) -> bool:
        return self.kind is not FailureModeKind.FAILURES_ONLY


class ProtocolParams(BaseModel):
    """Tunables of the P_2n and P_ECC regimes."""
    model_config = ConfigDict(extra="forbid")

    threshold_degree: int | None = Field(
        default=None,
        ge=1,
        description="Degree cap of active recovery; unset means threshold_factor x initial mean degree",
    )
    threshold_factor: float = Field(default=3.0, gt=0.0)
    t_ecc: float = Field(default=0.5, ge=0.0, le=1.0, description="ECC above which a link may be pruned")
    r: int = Field(default=1, ge=1, description="Maximum links removed per prune check")
    target_check_period: int = Field(default=5, ge=1, description="Rounds between prune checks")
    target_window: int = Field(default=10, ge=1, description="Rounds averaged into the targets")
    growth_factor: float = Field(default=1.5, gt=1.0, description="Multiplier quantifying 'much larger'")
    backoff_max: int = Field(default=3, ge=1, description="Upper bound of the random backoff, in ticks")
    prune_enabled: bool = Field(default=True)
    anchor_targets: bool = Field(
        default=True,
        description="Keep a node's targets fixed while it is above its growth trigger",
    )
    ecc_gate_enabled: bool = Field(default=True)
    message_budget_factor: int = Field(default=50, ge=1, description="Per-round messages per active node")


class ExperimentConfig(BaseModel):
    """Complete parameterization of an experiment."""
    model_config = ConfigDict(extra="forbid")

    topology: TopologyConfig = Field(default_factory=TopologyConfig)
    mode: FailureMode = Field(default_factory=FailureMode)
    protocols: list[ProtocolKind] = Field(
        default_factory=lambda: [ProtocolKind.NONE, ProtocolKind.P2N, ProtocolKind.PECC],
        min_length=1,
    )
    params: ProtocolParams = Field(default_factory=ProtocolParams)
    replicates: int = Field(default=20, ge=1)
    rounds: int = Field(default=200, ge=1, description="Ignored by failures_only, which runs to exhaustion")
    transient_rounds: int | None = Field(
        default=None,
        ge=0,
        description="Warm-up rounds excluded from summaries; unset means 10% (0 for failures_only)",
    )
    base_seed: int = Field(default=1, ge=0)
    snapshot_round: int | None = Field(default=None, ge=0, description="Round of the degree snapshot")
    workers: int = Field(default=1, ge=1, description="Processes used for replicates")

    @model_validator(mode="after")
    def _check_rounds(self) -> "ExperimentConfig":
        if self.transient_rounds is not None and self.transient_rounds >= self.rounds:
            raise ValueError("transient_rounds must be smaller than rounds")
        if len(set(self.protocols)) != len(self.protocols):
            raise ValueError("protocols must not repeat")
        return self

    @property
    def effective_transient(self) -> int:
        """Warm-up rounds to drop before computing summaries."""
        if self.transient_rounds is not None:
            return self.transient_rounds
        if self.mode.kind is FailureModeKind.FAILURES_ONLY:
            return 0
        return self.rounds // 10


class MetricsRow(BaseModel):
    """Metrics measured at the end of one round."""
    round: int
    main_component_size: int
    main_component_fraction: float = Field(ge=0.0, le=1.0)
    isolated_count: int
    avg_n1: float
    avg_n2: float
    active_count: int
    links_total: int
    messages_sent: int
    degree_std: float = 0.0
    links_created: int = 0
    links_removed: int = 0
    messages_dropped: int = 0
    divergent: bool = False

    @model_validator(mode="after")
    def _check_isolated(self) -> "MetricsRow":
        if self.isolated_count > self.active_count:
            raise ValueError("isolated_count cannot exceed active_count")
        return self
