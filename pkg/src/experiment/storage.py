"""CSV persistence and per-round aggregation of run metrics."""

import re
from pathlib import Path

import pandas as pd

from ..config.schemas import MetricsRow

METRIC_FIELDS = list(MetricsRow.model_fields)
FLOAT_FORMAT = "%.6f"
RUN_FILE_PATTERN = re.compile(r"^run_(?P<protocol>[a-z0-9_]+)_(?P<seed>\d+)\.csv$")


def run_file_name(protocol: str, seed: int) -> str:
    return f"run_{protocol}_{seed}.csv"


def quantize(frame: pd.DataFrame) -> pd.DataFrame:
    """Round floats to their CSV representation and store flags as 0/1."""
    frame = frame.copy()
    for column in frame.columns:
        if pd.api.types.is_bool_dtype(frame[column]):
            frame[column] = frame[column].astype("int64")
        elif pd.api.types.is_float_dtype(frame[column]):
            frame[column] = frame[column].map(lambda v: float(FLOAT_FORMAT % v))
    return frame


def rows_to_frame(rows: list[MetricsRow]) -> pd.DataFrame:
    """Per-run frame with one row per round, columns in MetricsRow order."""
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=METRIC_FIELDS)
    return quantize(frame)


def write_csv(frame: pd.DataFrame, path: str | Path) -> None:
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")


def read_run_csv(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


def load_runs(out_dir: str | Path, protocol: str) -> dict[int, pd.DataFrame]:
    """Read every persisted run of a protocol, keyed by seed."""
    runs: dict[int, pd.DataFrame] = {}
    for path in sorted(Path(out_dir).glob(f"run_{protocol}_*.csv")):
        match = RUN_FILE_PATTERN.match(path.name)
        if match and match.group("protocol") == protocol:
            runs[int(match.group("seed"))] = read_run_csv(path)
    return runs


def aggregate_runs(runs: dict[int, pd.DataFrame]) -> pd.DataFrame:
    """Mean and population standard deviation of every metric per round.

    Replicates are combined in seed order, so the result does not depend on
    the order runs were produced in.
    """
    combined = pd.concat([runs[seed] for seed in sorted(runs)], ignore_index=True)
    grouped = combined.groupby("round", sort=True)
    mean, std = grouped.mean(), grouped.std(ddof=0)

    out = pd.DataFrame(index=mean.index)
    out["replicates"] = grouped.size()
    for metric in METRIC_FIELDS[1:]:
        out[f"{metric}_mean"] = mean[metric]
        out[f"{metric}_std"] = std[metric]
    return out.reset_index()


def summarize_runs(runs: dict[int, pd.DataFrame], transient_rounds: int) -> pd.DataFrame:
    """Mean and standard deviation of each metric over post-transient rounds."""
    combined = pd.concat([runs[seed] for seed in sorted(runs)], ignore_index=True)
    steady = combined[combined["round"] > transient_rounds].drop(columns="round")
    return pd.DataFrame(
        {"metric": steady.columns, "mean": steady.mean().values, "std": steady.std(ddof=0).values}
    )


def distribution_frame(dist: dict[int, float]) -> pd.DataFrame:
    return pd.DataFrame({"degree": list(dist), "probability": list(dist.values())})
