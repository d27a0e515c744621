"""This module contains reference constructions used to validate the samplers

The explicit mixture keeps every past sample set and draws each mixture
component from its own bank, so its memory grows with t. The Kalman recursion
is the closed-form posterior of the scalar linear-Gaussian identity model.
"""

import logging
from typing import Iterable, List, Optional, Sequence

import numpy as np

import pyrecency.metrics as pmet
from pyrecency.chain import evolve_step, init_ensemble
from pyrecency.errors import InvalidParameter, InvalidState, Unsupported
from pyrecency.mixing import (
    UNBOUNDED,
    DecaySpec,
    MixingWeights,
    allocate_samples,
    effective_horizon,
    mixing_weights,
)
from pyrecency.models import Prior, TransitionKernel
from pyrecency.seeding import Seed, make_rng, spawn_seeds

LOGGER = logging.getLogger(__name__)

ORACLE_EPSILON = 1e-6
COVARIANCE_TOLERANCE = 1e-10


class HistoryBank:
    """Every sample set drawn so far; bank j was drawn at step j"""

    def __init__(self, banks: Optional[Iterable[np.ndarray]] = None) -> None:
        self._banks: List[np.ndarray] = []
        for bank in banks or ():
            self.append(bank)

    def append(self, bank: np.ndarray) -> None:
        """Store the sample set of the next step"""
        bank = np.asarray(bank, dtype=float)
        if bank.ndim == 1:
            bank = bank.reshape(-1, 1)
        self._banks.append(bank)

    @property
    def banks(self) -> Sequence[np.ndarray]:
        """Read-only view of the stored banks"""
        return tuple(self._banks)

    @property
    def t(self) -> int:
        """Step of the most recent bank"""
        return len(self._banks) - 1

    @property
    def nbytes(self) -> int:
        """Bytes held by all banks"""
        return sum(bank.nbytes for bank in self._banks)

    def __getitem__(self, step: int) -> np.ndarray:
        return self._banks[step]

    def __len__(self):
        return len(self._banks)

    def __repr__(self):
        return f"HistoryBank(banks={len(self._banks)})"


def _series_with_initial_weights(beta: float, steps: int) -> MixingWeights:
    lags = np.arange(steps)
    return MixingWeights(np.append(beta * np.power(1.0 - beta, lags), (1.0 - beta) ** steps))


def _oracle_horizon(spec: DecaySpec) -> float:
    if spec.bounded:
        return spec.horizon  # type: ignore
    if spec.beta == 0:
        return float("inf")
    return effective_horizon(spec.beta, ORACLE_EPSILON)


def explicit_mixture(  # pylint: disable=too-many-arguments,too-many-locals
    history: HistoryBank,
    spec: DecaySpec,
    size: int,
    kernel: TransitionKernel,
    rng: np.random.Generator,
    include_prior: bool = False,
) -> np.ndarray:
    """Draw the next sample set from the explicit mixture over stored banks

    Lag m receives its allocate_samples share of `size`; each of its samples is
    the kernel image of a parent drawn uniformly from bank t - m. A finite or
    effective horizon longer than the history is truncated and renormalized.
    With include_prior, a history shorter than the horizon is treated as a
    partial mixture instead: closed-form weights for lags 1..t and the raw
    initial bank carrying the remaining (1 - beta) ** t."""
    if len(history) == 0:
        raise InvalidState("explicit mixture needs at least one bank of history")

    steps = len(history)
    horizon = _oracle_horizon(spec)
    with_prior = include_prior and steps <= horizon

    if with_prior:
        weights = _series_with_initial_weights(spec.beta, steps)
    else:
        weights = mixing_weights(spec.with_horizon(int(min(horizon, steps))))
    allocation = allocate_samples(size, weights)
    LOGGER.debug("Explicit mixture at step %s allocates %s", steps, allocation.counts)

    components = []
    for lag, count in enumerate(allocation.counts[: min(len(allocation), steps)], start=1):
        if count == 0:
            continue
        bank = history[steps - lag]
        parents = rng.integers(0, len(bank), size=count)
        components.append(kernel.sample(bank[parents], rng))
    if with_prior and allocation.counts[-1] > 0:
        initial = history[0]
        count = int(allocation.counts[-1])
        picks = rng.choice(len(initial), size=count, replace=count > len(initial))
        components.append(initial[picks])

    return np.concatenate(components)


def run_oracle(  # pylint: disable=too-many-arguments
    steps: int,
    size: int,
    beta: float,
    kernel: TransitionKernel,
    prior: Prior,
    seed: Seed,
    include_prior: bool = True,
) -> HistoryBank:
    """Build the explicit mixture for T steps; the returned history holds T + 1 banks"""
    rng = make_rng(seed)
    spec = DecaySpec(beta, horizon=UNBOUNDED) if beta > 0 else DecaySpec(beta, horizon=steps + 1)
    history = HistoryBank([prior.sample(size, rng)])
    for _ in range(steps):
        history.append(explicit_mixture(history, spec, size, kernel, rng, include_prior))
    return history


class DistanceTrace:  # pylint: disable=too-few-public-methods
    """Per-step distance between the sampler and the oracle, with the oracle self-distance"""

    def __init__(self, distances: List[float], baselines: List[float]) -> None:
        self.distances: List[float] = distances
        self.baselines: List[float] = baselines

    @property
    def steps(self) -> List[int]:
        """Steps 1..T the distances were taken at"""
        return list(range(1, len(self.distances) + 1))

    @property
    def mean_distance(self) -> float:
        """Average distance over all steps"""
        return float(np.mean(self.distances))

    @property
    def mean_baseline(self) -> float:
        """Average self-distance over all steps"""
        return float(np.mean(self.baselines))

    def __repr__(self):
        return (
            f"DistanceTrace(mean_distance={self.mean_distance}, "
            f"mean_baseline={self.mean_baseline})"
        )


def oracle_vs_chain_distance(  # pylint: disable=too-many-arguments,too-many-locals
    steps: int, size: int, beta: float, kernel: TransitionKernel, prior: Prior, seed: int
) -> DistanceTrace:
    """Run the sampler next to two independent oracles; report W1 per step

    The distance compares the sampler with the first oracle, the baseline
    compares the two oracles."""
    if prior.dimension != 1 or kernel.dimension != 1:
        raise Unsupported("oracle distance is exact for scalar states only")
    if steps < 1:
        raise InvalidParameter(f"number of steps must be positive, got {steps!r}")

    chain_seed, oracle_seed, baseline_seed = spawn_seeds(seed, 3)
    chain_rng = make_rng(chain_seed)
    oracle_rng = make_rng(oracle_seed)
    baseline_rng = make_rng(baseline_seed)

    spec = DecaySpec(beta, horizon=UNBOUNDED) if beta > 0 else DecaySpec(beta, horizon=steps + 1)
    ensemble = init_ensemble(size, prior, chain_rng)
    oracle = HistoryBank([prior.sample(size, oracle_rng)])
    baseline = HistoryBank([prior.sample(size, baseline_rng)])

    distances: List[float] = []
    baselines: List[float] = []
    for _ in range(steps):
        ensemble = evolve_step(ensemble, kernel, beta, chain_rng)
        oracle.append(explicit_mixture(oracle, spec, size, kernel, oracle_rng, include_prior=True))
        baseline.append(
            explicit_mixture(baseline, spec, size, kernel, baseline_rng, include_prior=True)
        )
        distances.append(pmet.wasserstein1(ensemble.samples[:, 0], oracle[-1][:, 0]))
        baselines.append(pmet.wasserstein1(oracle[-1][:, 0], baseline[-1][:, 0]))
        LOGGER.debug("Step %s: distance %s, baseline %s", ensemble.t, distances[-1], baselines[-1])

    return DistanceTrace(distances, baselines)


class GaussianBelief:
    """Gaussian state belief: mean vector and covariance matrix"""

    def __init__(self, mean, covariance) -> None:
        mean = np.atleast_1d(np.asarray(mean, dtype=float))
        covariance = np.atleast_2d(np.asarray(covariance, dtype=float))
        if covariance.shape != (len(mean), len(mean)):
            raise InvalidParameter(f"covariance shape {covariance.shape} does not fit the mean")
        if not np.allclose(covariance, covariance.T, atol=COVARIANCE_TOLERANCE, rtol=0):
            raise InvalidParameter("covariance must be symmetric")
        if np.linalg.eigvalsh(covariance).min() < -COVARIANCE_TOLERANCE:
            raise InvalidParameter("covariance must be positive semi-definite")
        self.mean: np.ndarray = mean
        self.covariance: np.ndarray = covariance

    @property
    def variance(self) -> float:
        """Variance of a scalar belief"""
        return float(self.covariance[0, 0])

    @property
    def std(self) -> float:
        """Standard deviation of a scalar belief"""
        return float(np.sqrt(max(self.variance, 0.0)))

    def __repr__(self):
        return f"GaussianBelief(mean={self.mean.tolist()}, covariance={self.covariance.tolist()})"


def kalman_step(
    belief: GaussianBelief, y: float, obs_noise: float, process_noise: float
) -> GaussianBelief:
    """One predict-update cycle of the scalar identity-transition Kalman filter"""
    if len(belief.mean) != 1:
        raise Unsupported("the reference Kalman recursion handles scalar states only")
    if obs_noise <= 0:
        raise InvalidParameter(f"observation noise variance must be positive, got {obs_noise!r}")
    if process_noise < 0:
        raise InvalidParameter(f"process noise variance must be nonnegative, got {process_noise!r}")

    mean = float(belief.mean[0])
    variance = belief.variance + process_noise
    gain = variance / (variance + obs_noise)
    mean += gain * (float(y) - mean)
    variance *= 1.0 - gain
    return GaussianBelief(mean, variance)


def kalman_filter(
    prior: GaussianBelief, observations: Iterable[float], obs_noise: float, process_noise: float
) -> List[GaussianBelief]:
    """Posterior beliefs over a stream; the prior is used unchanged as the first prediction"""
    beliefs: List[GaussianBelief] = []
    belief = prior
    for index, y in enumerate(observations):
        belief = kalman_step(belief, y, obs_noise, process_noise if index > 0 else 0.0)
        beliefs.append(belief)
    return beliefs
