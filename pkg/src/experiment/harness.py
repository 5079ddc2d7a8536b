"""Replicated experiments comparing maintenance regimes on paired seeds."""

import logging
import multiprocessing
from dataclasses import dataclass, field

import pandas as pd

from ..config.schemas import ExperimentConfig, MetricsRow, ProtocolKind, TopologyConfig
from ..errors import FitError
from ..overlay.graph import OverlayGraph
from ..overlay.metrics import degree_distribution
from ..simulation.engine import ChurnSimulator, derive_streams
from ..topology.generators import GeneratedTopology, generate
from .analysis import LogLogFit, loglog_fit, pooled_distribution
from .storage import aggregate_runs, rows_to_frame, summarize_runs

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    """Outcome of one replicate of one protocol."""
    protocol: ProtocolKind
    seed: int
    rows: list[MetricsRow]
    original_distribution: dict[int, float]
    snapshot_distribution: dict[int, float] | None = None
    snapshot_graph: OverlayGraph | None = None

    @property
    def divergent(self) -> bool:
        return any(row.divergent for row in self.rows)

    @property
    def frame(self) -> pd.DataFrame:
        return rows_to_frame(self.rows)


@dataclass
class ProtocolReport:
    """Aggregated results of one protocol over all replicates."""
    protocol: ProtocolKind
    runs: list[RunResult]
    per_round: pd.DataFrame
    summary: pd.DataFrame
    degree_distribution: dict[int, float] | None = None
    fit: LogLogFit | None = None

    @property
    def divergent_seeds(self) -> list[int]:
        return [run.seed for run in self.runs if run.divergent]


@dataclass
class AggregateReport:
    """Results of a whole experiment."""
    config: ExperimentConfig
    protocols: dict[ProtocolKind, ProtocolReport] = field(default_factory=dict)
    original_distribution: dict[int, float] = field(default_factory=dict)
    original_fit: LogLogFit | None = None


def try_fit(dist: dict[int, float] | None) -> LogLogFit | None:
    if not dist:
        return None
    try:
        return loglog_fit(dist)
    except FitError:
        return None


def build_topology(topo_cfg: TopologyConfig, seed: int) -> GeneratedTopology:
    """Initial overlay of a replicate; identical for every protocol given the seed."""
    seeded = topo_cfg.model_copy(update={"seed": seed})
    return generate(seeded, derive_streams(seeded.seed).topology)


def run_replicate(cfg: ExperimentConfig, protocol: ProtocolKind, seed: int) -> RunResult:
    """Run one protocol on the overlay and workload derived from `seed`."""
    topology = build_topology(cfg.topology, seed)
    result = RunResult(
        protocol=protocol,
        seed=seed,
        rows=[],
        original_distribution=degree_distribution(topology.graph),
    )
    simulator = ChurnSimulator(topology, cfg.topology, cfg.mode, cfg.params, protocol, seed)

    def capture(sim: ChurnSimulator, row: MetricsRow) -> None:
        if row.round == cfg.snapshot_round:
            result.snapshot_distribution = degree_distribution(sim.graph)
            result.snapshot_graph = sim.graph.copy()

    if cfg.snapshot_round == 0:
        result.snapshot_distribution = dict(result.original_distribution)
        result.snapshot_graph = topology.graph.copy()

    result.rows = simulator.run_to_completion(cfg.rounds, observer=capture)
    logger.info(
        "Replicate %s seed=%d finished after %d rounds%s",
        protocol.value, seed, len(result.rows), " (divergent)" if result.divergent else "",
    )
    return result


def _run_all(cfg: ExperimentConfig, jobs: list[tuple[ProtocolKind, int]]) -> list[RunResult]:
    if cfg.workers == 1:
        return [run_replicate(cfg, protocol, seed) for protocol, seed in jobs]
    with multiprocessing.Pool(cfg.workers) as pool:
        return pool.starmap(run_replicate, [(cfg, protocol, seed) for protocol, seed in jobs])


def aggregate(cfg: ExperimentConfig, results: list[RunResult]) -> AggregateReport:
    """Reduce replicate results into per-protocol aggregates."""
    report = AggregateReport(config=cfg)
    first_protocol = cfg.protocols[0]
    originals = [r.original_distribution for r in results if r.protocol is first_protocol]
    report.original_distribution = pooled_distribution(originals)
    report.original_fit = try_fit(report.original_distribution)

    for protocol in cfg.protocols:
        runs = sorted((r for r in results if r.protocol is protocol), key=lambda r: r.seed)
        frames = {run.seed: run.frame for run in runs}
        snapshots = [run.snapshot_distribution for run in runs if run.snapshot_distribution]
        pooled = pooled_distribution(snapshots) if snapshots else None
        protocol_report = ProtocolReport(
            protocol=protocol,
            runs=runs,
            per_round=aggregate_runs(frames),
            summary=summarize_runs(frames, cfg.effective_transient),
            degree_distribution=pooled,
            fit=try_fit(pooled),
        )
        if protocol_report.divergent_seeds:
            logger.warning(
                "%s: divergent runs for seeds %s", protocol.value, protocol_report.divergent_seeds
            )
        report.protocols[protocol] = protocol_report
    return report


def run_experiment(cfg: ExperimentConfig) -> AggregateReport:
    """Run every protocol on `replicates` paired seeds and aggregate the results.

    Args:
        cfg: Experiment configuration

    Returns:
        AggregateReport with per-round aggregates for each protocol
    """
    seeds = [cfg.base_seed + i for i in range(cfg.replicates)]
    jobs = [(protocol, seed) for protocol in cfg.protocols for seed in seeds]
    logger.info(
        "Experiment: %s topology, %s mode, protocols=%s, %d replicates",
        cfg.topology.kind.value, cfg.mode.kind.value,
        [p.value for p in cfg.protocols], cfg.replicates,
    )
    report = aggregate(cfg, _run_all(cfg, jobs))
    logger.info("Experiment finished: %d runs", len(jobs))
    return report
