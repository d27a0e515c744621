"""This module contains evaluation metrics for samplers and filters"""

import json
import logging
import math
from typing import Dict, List, Sequence

import numpy as np
from scipy import stats

from pyrecency.chain import LagComposition
from pyrecency.errors import InvalidParameter
from pyrecency.models import ObservationRecord

LOGGER = logging.getLogger(__name__)


def _scalar_samples(name: str, values) -> np.ndarray:
    array = np.asarray(values, dtype=float)
    if array.ndim == 2 and array.shape[1] == 1:
        array = array[:, 0]
    if array.ndim != 1:
        raise InvalidParameter(f"{name} must be a set of scalar samples, got shape {array.shape}")
    if len(array) == 0:
        raise InvalidParameter(f"{name} must not be empty")
    return array


def wasserstein1(first, second) -> float:
    """Wasserstein-1 distance of two equal-size scalar sample sets

    Equals the mean absolute difference of the sorted samples."""
    first = _scalar_samples("first sample set", first)
    second = _scalar_samples("second sample set", second)
    if len(first) != len(second):
        raise InvalidParameter(f"sample sets differ in size: {len(first)} vs {len(second)}")
    return float(np.mean(np.abs(np.sort(first) - np.sort(second))))


def ks_statistic(first, second) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: largest gap between empirical CDFs"""
    first = _scalar_samples("first sample set", first)
    second = _scalar_samples("second sample set", second)
    return float(stats.ks_2samp(first, second).statistic)


def rmse(estimates, truths) -> float:
    """Root mean squared error of estimates against ground truth"""
    estimates = np.asarray(estimates, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if estimates.shape != truths.shape:
        raise InvalidParameter(f"length mismatch: {estimates.shape} vs {truths.shape}")
    if estimates.size == 0:
        raise InvalidParameter("rmse of an empty sequence is undefined")
    return float(np.sqrt(np.mean((estimates - truths) ** 2)))


def composition_deviation(
    compositions: Sequence[LagComposition], beta: float, size: int, max_lag: int
) -> np.ndarray:
    """Per-lag z-scores of mean observed counts against size * beta * (1 - beta) ** (m - 1)

    The standard error is taken across the given compositions (one per run).
    A lag without spread scores 0 when it matches exactly and +-inf otherwise."""
    if not compositions:
        raise InvalidParameter("composition deviation needs at least one composition")
    if any(item.t <= max_lag for item in compositions):
        raise InvalidParameter(f"compositions must be taken after step {max_lag}")

    observed = np.array([item.as_array(max_lag) for item in compositions], dtype=float)
    expected = size * beta * np.power(1.0 - beta, np.arange(max_lag))
    difference = observed.mean(axis=0) - expected
    if len(compositions) > 1:
        stderr = observed.std(axis=0, ddof=1) / math.sqrt(len(compositions))
    else:
        stderr = np.zeros(max_lag)

    scores = np.zeros(max_lag)
    spread = stderr > 0
    scores[spread] = difference[spread] / stderr[spread]
    mismatch = ~spread & (np.abs(difference) > 1e-9)
    scores[mismatch] = np.copysign(np.inf, difference[mismatch])

    LOGGER.debug("Composition z-scores for beta=%s: %s", beta, scores)
    return scores


REPORT_COLUMNS = ("t", "mean", "truth", "abs_error", "ess")


class MetricReport:
    """Summary of a filter run against ground truth, with per-step rows"""

    def __init__(self, rmse_value: float, mean_ess: float, min_ess: float, rows: List[Dict]):
        self.rmse: float = rmse_value
        self.mean_ess: float = mean_ess
        self.min_ess: float = min_ess
        self.rows: List[Dict] = rows

    def to_dict(self) -> Dict:
        """Return a JSON-ready mapping"""
        return {
            "rmse": self.rmse,
            "mean_ess": self.mean_ess,
            "min_ess": self.min_ess,
            "rows": self.rows,
        }

    def to_json(self) -> str:
        """Serialise the report deterministically"""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def csv_rows(self) -> List[List]:
        """Per-step rows in REPORT_COLUMNS order"""
        return [[row[column] for column in REPORT_COLUMNS] for row in self.rows]

    def __repr__(self):
        return f"MetricReport(rmse={self.rmse}, mean_ess={self.mean_ess}, min_ess={self.min_ess})"


def evaluate(trace: Sequence, records: Sequence[ObservationRecord]) -> MetricReport:
    """Score a filter trace against the truth carried by its observation records"""
    if len(trace) != len(records):
        raise InvalidParameter(f"trace has {len(trace)} steps but there are {len(records)} records")
    truthful = [
        (summary, record) for summary, record in zip(trace, records) if record.truth is not None
    ]
    if not truthful:
        raise InvalidParameter("no observation record carries ground truth")

    rows = [
        {
            "t": record.t,
            "mean": float(summary.mean[0]),
            "truth": float(record.truth[0]),
            "abs_error": float(np.abs(summary.mean - record.truth).max()),
            "ess": float(summary.ess),
        }
        for summary, record in truthful
    ]
    ess = np.array([summary.ess for summary in trace], dtype=float)
    return MetricReport(
        rmse(
            [summary.mean for summary, _ in truthful], [record.truth for _, record in truthful]
        ),
        float(ess.mean()),
        float(ess.min()),
        rows,
    )
