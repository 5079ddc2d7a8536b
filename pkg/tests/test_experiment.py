"""Tests for the experiment harness, aggregation and CSV output."""

import sys
from pathlib import Path

import pandas as pd
import pytest

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config.loader import build_config
from src.config.schemas import MetricsRow, ProtocolKind
from src.errors import FitError
from src.experiment.analysis import loglog_fit, pooled_distribution
from src.experiment.harness import build_topology, run_experiment, run_replicate
from src.experiment.output import regenerate_aggregates, write_report
from src.experiment.storage import METRIC_FIELDS, aggregate_runs, load_runs, read_run_csv

SMALL = {
    "topology": {"kind": "uniform", "n_nodes": 30, "uniform_degree": 4},
    "mode": {"kind": "targeted_attack"},
    "rounds": 15,
}


def small_config(**overrides):
    data = {**SMALL, "replicates": 3, "protocols": ["none", "p2n"]}
    data.update(overrides)
    return build_config(data)


class TestLogLogFit:
    """Tests for the degree-distribution fit."""

    def test_exact_power_law(self):
        """Test c·d^-2 fits with slope -2 and R² 1."""
        weights = {d: d ** -2.0 for d in range(1, 21)}
        total = sum(weights.values())
        fit = loglog_fit({d: w / total for d, w in weights.items()})
        assert fit.slope == pytest.approx(-2.0, abs=1e-9)
        assert fit.r2 == pytest.approx(1.0)
        assert fit.points == 20

    def test_single_spike_rejected(self):
        """Test a regular overlay's distribution cannot be fitted."""
        with pytest.raises(FitError):
            loglog_fit({4: 1.0})

    def test_pooled_distribution_averages(self):
        """Test pooling fills missing degrees with 0."""
        assert pooled_distribution([{1: 1.0}, {2: 1.0}]) == {1: 0.5, 2: 0.5}


class TestAggregation:
    """Tests for per-round aggregation."""

    def test_single_replicate_equals_run(self):
        """Test one replicate aggregates to its own rows with zero spread."""
        cfg = small_config(replicates=1, protocols=["p2n"])
        report = run_experiment(cfg)
        protocol_report = report.protocols[ProtocolKind.P2N]
        frame = protocol_report.runs[0].frame
        for metric in METRIC_FIELDS[1:]:
            assert list(protocol_report.per_round[f"{metric}_mean"]) == list(frame[metric].astype(float))
            assert (protocol_report.per_round[f"{metric}_std"] == 0).all()

    def test_replicate_order_irrelevant(self):
        """Test aggregation ignores the order replicates are supplied in."""
        cfg = small_config(protocols=["p2n"])
        runs = {seed: run_replicate(cfg, ProtocolKind.P2N, seed).frame for seed in (1, 2, 3)}
        reversed_runs = {seed: runs[seed] for seed in (3, 2, 1)}
        pd.testing.assert_frame_equal(aggregate_runs(runs), aggregate_runs(reversed_runs))

    def test_paired_seeds_share_initial_overlay(self):
        """Test every protocol starts from the same overlay for a seed."""
        cfg = small_config()
        none = run_replicate(cfg, ProtocolKind.NONE, 5)
        p2n = run_replicate(cfg, ProtocolKind.P2N, 5)
        assert none.original_distribution == p2n.original_distribution
        assert build_topology(cfg.topology, 5).graph == build_topology(cfg.topology, 5).graph
        assert none.rows[0].active_count == p2n.rows[0].active_count

    def test_summary_skips_transient(self):
        """Test summaries cover only post-transient rounds."""
        cfg = small_config(transient_rounds=5)
        summary = run_experiment(cfg).protocols[ProtocolKind.NONE].summary
        assert list(summary["metric"]) == METRIC_FIELDS[1:]


class TestWriteReport:
    """Tests for the CSV set."""

    def test_file_count(self, tmp_path):
        """Test 2 protocols x 3 seeds give 6 run CSVs and 2 aggregates."""
        write_report(run_experiment(small_config()), tmp_path)
        assert len(list(tmp_path.glob("run_*.csv"))) == 6
        assert sorted(p.name for p in tmp_path.glob("aggregate_*.csv")) == [
            "aggregate_none.csv", "aggregate_p2n.csv",
        ]
        assert (tmp_path / "summary.csv").exists()

    def test_header_matches_metrics_row(self, tmp_path):
        """Test run CSV columns follow MetricsRow field order."""
        write_report(run_experiment(small_config(replicates=1)), tmp_path)
        header = (tmp_path / "run_none_1.csv").read_text().splitlines()[0]
        assert header.split(",") == list(MetricsRow.model_fields)

    def test_reals_have_six_decimals(self, tmp_path):
        """Test floats are written with 6 decimal digits."""
        write_report(run_experiment(small_config(replicates=1)), tmp_path)
        line = (tmp_path / "run_none_1.csv").read_text().splitlines()[1].split(",")
        fraction = line[METRIC_FIELDS.index("main_component_fraction")]
        assert len(fraction.split(".")[1]) == 6

    def test_byte_identical_reruns(self, tmp_path):
        """Test the same config writes the same bytes."""
        cfg = small_config()
        write_report(run_experiment(cfg), tmp_path / "a")
        write_report(run_experiment(cfg), tmp_path / "b")
        for path in sorted((tmp_path / "a").iterdir()):
            assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()

    def test_regenerated_aggregates_identical(self, tmp_path):
        """Test aggregates rebuilt from run CSVs match the originals bit for bit."""
        write_report(run_experiment(small_config()), tmp_path)
        before = {p.name: p.read_bytes() for p in tmp_path.glob("aggregate_*.csv")}
        regenerate_aggregates(tmp_path, ["none", "p2n"])
        after = {p.name: p.read_bytes() for p in tmp_path.glob("aggregate_*.csv")}
        assert before == after

    def test_load_runs_keyed_by_seed(self, tmp_path):
        """Test persisted runs load back per seed."""
        write_report(run_experiment(small_config()), tmp_path)
        runs = load_runs(tmp_path, "p2n")
        assert sorted(runs) == [1, 2, 3]
        assert list(read_run_csv(tmp_path / "run_p2n_2.csv").columns) == METRIC_FIELDS

    def test_degree_distributions_with_snapshot(self, tmp_path):
        """Test a snapshot round adds per-protocol and original distributions."""
        cfg = small_config(protocols=["none", "p2n", "pecc"], snapshot_round=10)
        write_report(run_experiment(cfg), tmp_path, export_snapshots=True)
        names = sorted(p.name for p in tmp_path.glob("degree_dist_*.csv"))
        assert names == [
            "degree_dist_none.csv", "degree_dist_original.csv",
            "degree_dist_p2n.csv", "degree_dist_pecc.csv",
        ]
        assert len(list(tmp_path.glob("snapshot_*.edges"))) == 9
        dist = pd.read_csv(tmp_path / "degree_dist_original.csv")
        assert dist["probability"].sum() == pytest.approx(1.0)
