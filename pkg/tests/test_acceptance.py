"""Multi-seed trend checks of the preconfigured scenarios.

These run the full scenario sizes and are deselected by default;
run them with `pytest -m slow`.
"""

import sys
from pathlib import Path

import networkx as nx
import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.scenarios import get_scenario
from src.config.schemas import ExperimentConfig, ProtocolKind
from src.experiment.harness import RunResult, build_topology, run_replicate, try_fit
from src.experiment.storage import aggregate_runs
from src.simulation.engine import ChurnSimulator

pytestmark = pytest.mark.slow

SEEDS = range(1, 21)
REPAIRING = (ProtocolKind.P2N, ProtocolKind.PECC)


def scenario_config(name: str) -> ExperimentConfig:
    [(_, cfg)] = get_scenario(name).configs()
    return cfg


def runs(cfg: ExperimentConfig, protocol: ProtocolKind) -> list[RunResult]:
    return [run_replicate(cfg, protocol, seed) for seed in SEEDS]


def post_transient_mean(result: RunResult, field: str, transient: int) -> float:
    values = [getattr(row, field) for row in result.rows if row.round > transient]
    return sum(values) / len(values)


def clusters_stay_joined(cfg: ExperimentConfig, protocol: ProtocolKind, seed: int) -> bool:
    """True when, at every round, the main component touches every cluster that has live nodes."""
    topology = build_topology(cfg.topology, seed)
    sim = ChurnSimulator(topology, cfg.topology, cfg.mode, cfg.params, protocol, seed)
    joined = True

    def observe(sim: ChurnSimulator, row) -> None:
        nonlocal joined
        main = max(nx.connected_components(sim.graph.to_networkx()), key=len)
        live = {sim.cluster_of[n] for n in sim.graph.active_nodes()}
        joined = joined and {sim.cluster_of[n] for n in main} == live

    sim.run_to_completion(cfg.rounds, observer=observe)
    return joined


class TestUniformFailures:
    """Random failures on a uniform overlay."""

    def test_repair_keeps_one_component(self):
        """Test repairing regimes never isolate nodes nor split the overlay."""
        cfg = scenario_config("uniform-failures")
        for protocol in REPAIRING:
            good = 0
            for result in runs(cfg, protocol):
                rows = [row for row in result.rows if row.active_count >= 3]
                if all(r.isolated_count == 0 and r.main_component_fraction == 1.0 for r in rows):
                    good += 1
            assert good >= 18, protocol

    def test_no_repair_fragments(self):
        """Test the none regime loses 10% of the main component at some round."""
        cfg = scenario_config("uniform-failures")
        fragmented = sum(
            any(row.main_component_fraction < 0.9 for row in result.rows)
            for result in runs(cfg, ProtocolKind.NONE)
        )
        assert fragmented >= 18


class TestClusteredAttack:
    """Attack on inter-cluster links of a connected multi-cluster overlay."""

    def test_repair_holds_main_component(self):
        """Test repair keeps at least 10 points more of the main component."""
        cfg = scenario_config("clustered-attack")
        transient = cfg.effective_transient
        none = [post_transient_mean(r, "main_component_fraction", transient)
                for r in runs(cfg, ProtocolKind.NONE)]
        for protocol in REPAIRING:
            repaired = [post_transient_mean(r, "main_component_fraction", transient)
                        for r in runs(cfg, protocol)]
            assert sum(repaired) / len(repaired) - sum(none) / len(none) >= 0.10, protocol

    def test_repair_keeps_clusters_together(self):
        """Test every cluster with a live node stays in the main component."""
        cfg = scenario_config("clustered-attack")
        for protocol in REPAIRING:
            joined = sum(clusters_stay_joined(cfg, protocol, seed) for seed in SEEDS)
            assert joined >= 18, protocol


class TestClusteredFailures:
    """Random failures on rarely bridged clusters."""

    def test_isolated_nodes_stay_negligible(self):
        """Test the replicate-mean isolated count stays under 2% of the active nodes."""
        cfg = scenario_config("clustered-failures")
        for protocol in REPAIRING:
            results = runs(cfg, protocol)
            frame = aggregate_runs({r.seed: r.frame for r in results})
            cutoff = int(len(frame) * 0.9)
            head = frame.iloc[:cutoff]
            assert (head["isolated_count_mean"] <= 0.02 * head["active_count_mean"] + 1e-9).all(), protocol

    def test_none_isolated_grows(self):
        """Test isolated nodes pile up without repair."""
        cfg = scenario_config("clustered-failures")
        frame = aggregate_runs({r.seed: r.frame for r in runs(cfg, ProtocolKind.NONE)})
        quarter = len(frame) // 4
        means = [frame["isolated_count_mean"].iloc[i * quarter:(i + 1) * quarter].mean() for i in range(3)]
        assert means == sorted(means)
        assert means[2] > means[0]


class TestScaleFreeAttack:
    """Hub removal on the 636-node scale-free overlay."""

    def test_second_neighborhood(self):
        """Test avg_n2 collapses without repair and holds with it."""
        cfg = scenario_config("sf-attack")

        def ratio(result: RunResult) -> float:
            initial = result.rows[0].avg_n2
            at_fifty = next(row.avg_n2 for row in result.rows if row.round == 50)
            return at_fifty / initial

        assert sum(ratio(r) < 0.5 for r in runs(cfg, ProtocolKind.NONE)) >= 18
        for protocol in REPAIRING:
            assert sum(ratio(r) >= 0.8 for r in runs(cfg, protocol)) >= 18, protocol


class TestDegreeDistribution:
    """Power-law preservation after 50 attacked rounds."""

    def test_pecc_stays_closer_to_original(self):
        """Test P_ECC keeps the original slope better than P_2n."""
        cfg = scenario_config("sf-degree-dist")
        good = 0
        for seed in SEEDS:
            p2n = run_replicate(cfg, ProtocolKind.P2N, seed)
            pecc = run_replicate(cfg, ProtocolKind.PECC, seed)
            original = try_fit(pecc.original_distribution)
            fit_p2n, fit_pecc = try_fit(p2n.snapshot_distribution), try_fit(pecc.snapshot_distribution)
            if None in (original, fit_p2n, fit_pecc):
                continue
            ranked = original.r2 >= fit_pecc.r2 > fit_p2n.r2
            slope_pecc = abs(fit_pecc.slope - original.slope)
            slope_p2n = abs(fit_p2n.slope - original.slope)
            if ranked and slope_pecc <= 0.5 < slope_p2n:
                good += 1
        assert good >= 15


class TestEvolutionStability:
    """Paired failures and arrivals."""

    @pytest.mark.parametrize("name", ["uniform-evolution", "clustered-evolution", "sf-evolution"])
    def test_size_constant(self, name):
        """Test the active count never changes."""
        cfg = scenario_config(name).model_copy(update={"replicates": 3})
        for protocol in ProtocolKind:
            for seed in (1, 2, 3):
                rows = run_replicate(cfg, protocol, seed).rows
                assert len({row.active_count for row in rows}) == 1

    def test_uniform_second_neighborhood_lower_without_repair(self):
        """Test avg_n2 under none stays below both repairing regimes."""
        cfg = scenario_config("uniform-evolution")
        transient = cfg.effective_transient
        wins = 0
        for seed in SEEDS:
            none = post_transient_mean(run_replicate(cfg, ProtocolKind.NONE, seed), "avg_n2", transient)
            repaired = [
                post_transient_mean(run_replicate(cfg, p, seed), "avg_n2", transient) for p in REPAIRING
            ]
            wins += all(none < value for value in repaired)
        assert wins >= 18
