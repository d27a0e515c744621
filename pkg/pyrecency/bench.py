"""This module contains the fixed-cost benchmark of the filter"""

import logging
import time
from typing import Dict, List, Sequence

import numpy as np

from pyrecency.chain import init_ensemble
from pyrecency.errors import InvalidParameter, InvalidState
from pyrecency.filtering import FilterConfig, FilterState, filter_step
from pyrecency.models import ObservationRecord
from pyrecency.oracle import run_oracle
from pyrecency.seeding import make_rng

LOGGER = logging.getLogger(__name__)

MINIMUM_STEPS = 10000
EARLY_WINDOW = (10, 20)
LATE_WINDOW_LENGTH = 10


class BenchReport:  # pylint: disable=too-few-public-methods,too-many-instance-attributes
    """Latency and memory figures of one benchmark run"""

    def __init__(self, latencies: List[float], ensemble_bytes: List[int], oracle_banks: int,
                 oracle_bytes: int, particles: int) -> None:
        steps = len(latencies)
        first, last = EARLY_WINDOW
        self.steps: int = steps
        self.particles: int = particles
        self.early_median: float = float(np.median(latencies[first - 1 : last]))
        self.late_median: float = float(np.median(latencies[steps - LATE_WINDOW_LENGTH - 1 :]))
        self.ensemble_bytes_peak: int = max(ensemble_bytes)
        self.ensemble_size_constant: bool = len(set(ensemble_bytes)) == 1
        self.oracle_banks: int = oracle_banks
        self.oracle_bytes: int = oracle_bytes

    @property
    def latency_ratio(self) -> float:
        """Late over early median step latency"""
        return self.late_median / self.early_median if self.early_median > 0 else float("inf")

    def to_dict(self) -> Dict:
        """Return a JSON-ready mapping"""
        first, last = EARLY_WINDOW
        return {
            "steps": self.steps,
            "particles": self.particles,
            "early_window": [first, last],
            "late_window": [self.steps - LATE_WINDOW_LENGTH, self.steps],
            "early_median_seconds": self.early_median,
            "late_median_seconds": self.late_median,
            "latency_ratio": self.latency_ratio,
            "ensemble_bytes_peak": self.ensemble_bytes_peak,
            "ensemble_size_constant": self.ensemble_size_constant,
            "oracle_banks": self.oracle_banks,
            "oracle_bytes": self.oracle_bytes,
        }

    def __repr__(self):
        return f"BenchReport({self.to_dict()})"


def bench(config: FilterConfig, records: Sequence[ObservationRecord]) -> BenchReport:
    """Time every filter step and contrast ensemble memory with the oracle's history

    Raises InvalidState if the ensemble ever stops holding exactly L particles."""
    if len(records) < MINIMUM_STEPS:
        raise InvalidParameter(f"bench needs at least {MINIMUM_STEPS} steps, got {len(records)}")

    rng = make_rng(config.seed)
    state = FilterState(init_ensemble(config.particles, config.prior, rng))
    latencies: List[float] = []
    ensemble_bytes: List[int] = []

    for record in records:
        started = time.perf_counter()
        state, _ = filter_step(state, record.y, config, rng)
        latencies.append(time.perf_counter() - started)
        if state.ensemble.size != config.particles:
            raise InvalidState(f"ensemble holds {state.ensemble.size} particles at step {state.t}")
        ensemble_bytes.append(state.ensemble.nbytes)

    history = run_oracle(
        len(records), config.particles, config.beta, config.kernel, config.prior, config.seed
    )
    LOGGER.debug("Benchmarked %s steps; oracle holds %s banks", len(records), len(history))
    return BenchReport(latencies, ensemble_bytes, len(history), history.nbytes, config.particles)
