"""Writing an AggregateReport as plot-ready CSV files."""

import logging
from pathlib import Path

import pandas as pd

from ..overlay.graph import write_edge_list
from .analysis import LogLogFit
from .harness import AggregateReport, ProtocolReport, try_fit
from .storage import (
    aggregate_runs,
    distribution_frame,
    load_runs,
    run_file_name,
    write_csv,
)

logger = logging.getLogger(__name__)


def _fit_rows(protocol: str, fits: list[LogLogFit]) -> list[dict]:
    if not fits:
        return []
    slopes = pd.Series([f.slope for f in fits])
    r2 = pd.Series([f.r2 for f in fits])
    return [
        {"protocol": protocol, "metric": "loglog_slope", "mean": slopes.mean(), "std": slopes.std(ddof=0)},
        {"protocol": protocol, "metric": "loglog_r2", "mean": r2.mean(), "std": r2.std(ddof=0)},
    ]


def _summary_rows(protocol_report: ProtocolReport) -> list[dict]:
    name = protocol_report.protocol.value
    rows = [
        {"protocol": name, "metric": item.metric, "mean": item.mean, "std": item.std}
        for item in protocol_report.summary.itertuples()
    ]
    rows.append({
        "protocol": name,
        "metric": "divergent_runs",
        "mean": float(len(protocol_report.divergent_seeds)),
        "std": 0.0,
    })
    fits = [try_fit(run.snapshot_distribution) for run in protocol_report.runs]
    rows.extend(_fit_rows(name, [f for f in fits if f is not None]))
    return rows


def write_report(report: AggregateReport, out_dir: str | Path, export_snapshots: bool = False) -> list[Path]:
    """Write run, aggregate, degree-distribution and summary CSVs.

    Returns:
        Paths of the written files
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    summary: list[dict] = []

    for protocol, protocol_report in report.protocols.items():
        for run in protocol_report.runs:
            path = out / run_file_name(protocol.value, run.seed)
            write_csv(run.frame, path)
            written.append(path)
            if export_snapshots and run.snapshot_graph is not None:
                edges = out / f"snapshot_{protocol.value}_{run.seed}.edges"
                write_edge_list(run.snapshot_graph, edges, report.config.snapshot_round)
                written.append(edges)

        path = out / f"aggregate_{protocol.value}.csv"
        write_csv(protocol_report.per_round, path)
        written.append(path)

        if protocol_report.degree_distribution is not None:
            path = out / f"degree_dist_{protocol.value}.csv"
            write_csv(distribution_frame(protocol_report.degree_distribution), path)
            written.append(path)

        summary.extend(_summary_rows(protocol_report))

    if report.config.snapshot_round is not None:
        path = out / "degree_dist_original.csv"
        write_csv(distribution_frame(report.original_distribution), path)
        written.append(path)
        originals = [r.original_distribution for r in next(iter(report.protocols.values())).runs]
        summary.extend(_fit_rows("original", [f for f in map(try_fit, originals) if f is not None]))

    path = out / "summary.csv"
    write_csv(pd.DataFrame(summary, columns=["protocol", "metric", "mean", "std"]), path)
    written.append(path)
    logger.info("Wrote %d files to %s", len(written), out)
    return written


def regenerate_aggregates(out_dir: str | Path, protocols: list[str]) -> list[Path]:
    """Rebuild aggregate CSVs from the persisted run CSVs of each protocol."""
    out = Path(out_dir)
    written: list[Path] = []
    for protocol in protocols:
        runs = load_runs(out, protocol)
        if not runs:
            logger.warning("No run files for protocol %s in %s", protocol, out)
            continue
        path = out / f"aggregate_{protocol}.csv"
        write_csv(aggregate_runs(runs), path)
        written.append(path)
    return written
