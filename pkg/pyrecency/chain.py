"""This module contains code that evolves a fixed-size latent sample set

Each step replaces a beta-fraction of the samples with fresh transition draws
while the rest survive untouched. After t steps the samples represent a mixture
of past states whose composition decays geometrically with the lag.

A sample drawn at step t has lag 1 at step t; a sample surviving from the
initial draw has lag t + 1.
"""

import logging
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from pyrecency.errors import InvalidParameter, InvalidState
from pyrecency.models import Prior, TransitionKernel
from pyrecency.seeding import Seed, make_rng, spawn_seeds

LOGGER = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12


def replacement_count(size: int, beta: float) -> int:
    """Number of slots refreshed per step: size * beta rounded half up"""
    if not 0.0 <= beta <= 1.0:
        raise InvalidParameter(f"beta must lie in [0, 1], got {beta!r}")
    return min(size, int(math.floor(size * beta + 0.5)))


class Ensemble:
    """Fixed-size set of L state samples with birth-time tags

    samples is an (L, d) array, birth holds the step each sample was drawn at
    and weights, when present, are normalized importance weights."""

    def __init__(
        self,
        samples: np.ndarray,
        birth: np.ndarray,
        t: int = 0,
        weights: Optional[np.ndarray] = None,
    ) -> None:
        samples = np.asarray(samples, dtype=float)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1)
        birth = np.asarray(birth, dtype=np.int64)

        if samples.ndim != 2 or len(samples) < 1:
            raise InvalidState(f"ensemble needs a nonempty (L, d) array, got {samples.shape}")
        if birth.shape != (len(samples),):
            raise InvalidState(f"expected {len(samples)} birth tags, got shape {birth.shape}")
        if np.any(birth > t):
            raise InvalidState(f"birth tags must not exceed the current step {t}")
        if weights is not None:
            weights = np.asarray(weights, dtype=float)
            if weights.shape != (len(samples),) or np.any(weights < 0):
                raise InvalidState("weights must be one nonnegative value per sample")
            if abs(weights.sum() - 1.0) > WEIGHT_TOLERANCE:
                raise InvalidState(f"weights must sum to 1, got {weights.sum()!r}")

        self.samples: np.ndarray = samples
        self.birth: np.ndarray = birth
        self.t: int = int(t)
        self.weights: Optional[np.ndarray] = weights

    @property
    def size(self) -> int:
        """Number of samples L"""
        return len(self.samples)

    @property
    def dimension(self) -> int:
        """Dimension d of every state"""
        return self.samples.shape[1]

    @property
    def nbytes(self) -> int:
        """Bytes held by the samples and their tags"""
        return int(self.samples.nbytes + self.birth.nbytes)

    def __len__(self):
        return self.size

    def __repr__(self):
        return (
            f"Ensemble(size={self.size}, dimension={self.dimension}, t={self.t}, "
            f"weighted={self.weights is not None})"
        )


class LagComposition(Mapping[int, int]):
    """Number of samples per mixture component (lag) at a given step"""

    def __init__(self, counts: Dict[int, int], t: int) -> None:
        self._counts: Dict[int, int] = dict(sorted(counts.items()))
        self.t: int = t

    def __getitem__(self, lag: int) -> int:
        return self._counts[lag]

    def __iter__(self) -> Iterator[int]:
        return iter(self._counts)

    def __len__(self):
        return len(self._counts)

    def count(self, lag: int) -> int:
        """Samples at a lag, zero for lags that are not represented"""
        return self._counts.get(lag, 0)

    @property
    def total(self) -> int:
        """Total number of samples"""
        return sum(self._counts.values())

    def as_array(self, max_lag: int) -> np.ndarray:
        """Counts for lags 1..max_lag"""
        return np.array([self.count(lag) for lag in range(1, max_lag + 1)], dtype=np.int64)

    def __repr__(self):
        return f"LagComposition(t={self.t}, counts={self._counts})"


def init_ensemble(size: int, prior: Prior, seed: Seed) -> Ensemble:
    """Draw L independent samples from the prior; all birth tags and t are 0"""
    if isinstance(size, bool) or not isinstance(size, (int, np.integer)) or size < 1:
        raise InvalidParameter(f"ensemble size must be a positive integer, got {size!r}")
    rng = make_rng(seed)
    samples = prior.sample(int(size), rng)
    LOGGER.debug("Initialised %s samples from %r", size, prior)
    return Ensemble(samples, np.zeros(int(size), dtype=np.int64), t=0)


def evolve_step(
    ensemble: Ensemble, kernel: TransitionKernel, beta: float, rng: np.random.Generator
) -> Ensemble:
    """Replace round(L * beta) random slots with kernel draws from the previous ensemble

    Parents are drawn uniformly with replacement from the whole previous
    ensemble; the replaced slots are chosen without replacement."""
    size = ensemble.size
    replaced = replacement_count(size, beta)

    slots = rng.choice(size, size=replaced, replace=False)
    parents = rng.integers(0, size, size=replaced)

    samples = ensemble.samples.copy()
    birth = ensemble.birth.copy()
    samples[slots] = kernel.sample(ensemble.samples[parents], rng)
    birth[slots] = ensemble.t + 1

    LOGGER.debug("Step %s: replaced %s of %s samples", ensemble.t + 1, replaced, size)
    return Ensemble(samples, birth, t=ensemble.t + 1)


def composition(ensemble: Ensemble) -> LagComposition:
    """Histogram of sample lags, lag = t - birth + 1"""
    lags = ensemble.t - ensemble.birth + 1
    return LagComposition(dict(Counter(lags.tolist())), ensemble.t)


def expected_lag_counts(size: int, beta: float, t: int, max_lag: int) -> np.ndarray:
    """Expected number of samples per lag 1..max_lag at step t

    Lags 1..t hold size * beta * (1 - beta) ** (m - 1); the surviving initial
    draw sits at lag t + 1 with size * (1 - beta) ** t."""
    expected = np.zeros(max_lag)
    for lag in range(1, max_lag + 1):
        if lag <= t:
            expected[lag - 1] = size * beta * (1.0 - beta) ** (lag - 1)
        elif lag == t + 1:
            expected[lag - 1] = size * (1.0 - beta) ** t
    return expected


class ChainRun:  # pylint: disable=too-few-public-methods
    """Compositions after every step of a chain run plus its final ensemble"""

    def __init__(self, compositions: List[LagComposition], ensemble: Ensemble) -> None:
        self.compositions: List[LagComposition] = compositions
        self.ensemble: Ensemble = ensemble

    def __repr__(self):
        return f"ChainRun(steps={len(self.compositions)}, ensemble={self.ensemble!r})"


def run_chain(  # pylint: disable=too-many-arguments
    size: int, prior: Prior, kernel: TransitionKernel, beta: float, steps: int, seed: Seed
) -> ChainRun:
    """Evolve a fresh ensemble for T steps, recording the composition after each"""
    if isinstance(steps, bool) or not isinstance(steps, (int, np.integer)) or steps < 1:
        raise InvalidParameter(f"number of steps must be a positive integer, got {steps!r}")
    replacement_count(1, beta)

    rng = make_rng(seed)
    ensemble = init_ensemble(size, prior, rng)
    footprint = ensemble.nbytes
    compositions: List[LagComposition] = []

    for _ in range(steps):
        ensemble = evolve_step(ensemble, kernel, beta, rng)
        if ensemble.size != size or ensemble.nbytes != footprint:
            raise InvalidState(f"ensemble storage changed at step {ensemble.t}")
        compositions.append(composition(ensemble))

    return ChainRun(compositions, ensemble)


def _run_replica(arguments: Tuple) -> ChainRun:
    return run_chain(*arguments)


def run_chain_replicas(  # pylint: disable=too-many-arguments
    size: int,
    prior: Prior,
    kernel: TransitionKernel,
    beta: float,
    steps: int,
    seed: int,
    runs: int = 1,
    jobs: int = 1,
) -> List[ChainRun]:
    """Run independent seeded chains; results come back in seed order

    A single run uses `seed` itself, several runs use its spawned children."""
    if runs < 1:
        raise InvalidParameter(f"number of runs must be positive, got {runs!r}")
    seeds: List[Seed] = [seed] if runs == 1 else list(spawn_seeds(seed, runs))
    arguments = [(size, prior, kernel, beta, steps, child) for child in seeds]

    if jobs > 1 and runs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            return list(executor.map(_run_replica, arguments))
    return [_run_replica(argument) for argument in arguments]
