"""Degree-distribution analysis."""

from collections.abc import Iterable
from dataclasses import dataclass

import numpy as np

from ..errors import FitError


@dataclass(frozen=True)
class LogLogFit:
    """Least-squares line through log(probability) against log(degree)."""
    slope: float
    intercept: float
    r2: float
    points: int


def loglog_fit(dist: dict[int, float]) -> LogLogFit:
    """Fit log p(d) = slope * log d + intercept over positive degrees and probabilities.

    Raises:
        FitError: fewer than three usable points
    """
    points = sorted((d, p) for d, p in dist.items() if d > 0 and p > 0)
    if len(points) < 3:
        raise FitError(f"log-log fit needs at least 3 points, got {len(points)}")

    x = np.log([d for d, _ in points])
    y = np.log([p for _, p in points])
    slope, intercept = np.polyfit(x, y, 1)

    residual = y - (slope * x + intercept)
    total = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 if total == 0 else 1.0 - float(np.sum(residual ** 2)) / total
    return LogLogFit(slope=float(slope), intercept=float(intercept), r2=r2, points=len(points))


def pooled_distribution(dists: Iterable[dict[int, float]]) -> dict[int, float]:
    """Average several degree distributions (a missing degree counts as 0)."""
    dists = list(dists)
    if not dists:
        return {}
    degrees = sorted({d for dist in dists for d in dist})
    return {d: float(np.mean([dist.get(d, 0.0) for dist in dists])) for d in degrees}
