"""This module contains the recency-weighted importance resampling filter

Every step weighs the predictive ensemble by the observation likelihood,
summarises the weighted posterior, replaces a beta-fraction of randomly chosen
slots with draws from that posterior and adds system noise to all particles.
With beta = 1 this is plain multinomial importance resampling.
"""

import logging
import math
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp

from pyrecency.chain import Ensemble, init_ensemble, replacement_count
from pyrecency.errors import DegenerateWeights, InputError, InvalidParameter, InvalidState, NoData
from pyrecency.mixing import DecaySpec
from pyrecency.models import (
    IdentityKernel,
    NormalPrior,
    ObservationModel,
    ObservationRecord,
    Prior,
    TransitionKernel,
)
from pyrecency.seeding import make_rng

LOGGER = logging.getLogger(__name__)

RESAMPLING_SCHEMES = ("multinomial", "systematic", "stratified", "residual")


class FilterConfig:  # pylint: disable=too-few-public-methods,too-many-instance-attributes
    """Everything a filter run needs apart from the observations"""

    def __init__(  # pylint: disable=too-many-arguments
        self,
        particles: int,
        decay: DecaySpec,
        obs_model: ObservationModel,
        noise_std: Union[float, Sequence[float]] = 0.0,
        kernel: Optional[TransitionKernel] = None,
        prior: Optional[Prior] = None,
        seed: int = 0,
        resampling: str = "multinomial",
    ) -> None:
        if (
            isinstance(particles, bool)
            or not isinstance(particles, (int, np.integer))
            or particles < 1
        ):
            raise InvalidParameter(f"particle count must be a positive integer, got {particles!r}")
        noise = np.atleast_1d(np.asarray(noise_std, dtype=float))
        if not np.all(np.isfinite(noise)) or np.any(noise < 0):
            raise InvalidParameter(f"system noise std must be nonnegative, got {noise_std!r}")
        if resampling not in RESAMPLING_SCHEMES:
            raise InvalidParameter(
                f"resampling must be one of {RESAMPLING_SCHEMES}, got {resampling!r}"
            )

        self.particles: int = int(particles)
        self.decay: DecaySpec = decay
        self.obs_model: ObservationModel = obs_model
        self.kernel: TransitionKernel = kernel or IdentityKernel(obs_model.dimension)
        self.prior: Prior = prior or NormalPrior(dimension=obs_model.dimension)
        self.noise_std: np.ndarray = noise
        self.seed: int = seed
        self.resampling: str = resampling

        dimensions = {self.obs_model.dimension, self.kernel.dimension, self.prior.dimension}
        if len(dimensions) != 1 or len(noise) not in (1, self.obs_model.dimension):
            raise InvalidParameter("prior, kernel, model and noise differ in dimension")

    @property
    def beta(self) -> float:
        """Fraction of particles refreshed from the posterior each step"""
        return self.decay.beta

    @property
    def dimension(self) -> int:
        """Dimension of the latent state"""
        return self.obs_model.dimension

    def __repr__(self):
        return (
            f"FilterConfig(particles={self.particles}, decay={self.decay!r}, "
            f"obs_model={self.obs_model!r}, noise_std={self.noise_std.tolist()}, "
            f"kernel={self.kernel!r}, prior={self.prior!r}, seed={self.seed}, "
            f"resampling={self.resampling})"
        )


class FilterState:  # pylint: disable=too-few-public-methods
    """Predictive (equally weighted) ensemble between two filter steps"""

    def __init__(self, ensemble: Ensemble) -> None:
        if ensemble.weights is not None:
            raise InvalidState("a predictive ensemble must not carry importance weights")
        self.ensemble: Ensemble = ensemble

    @property
    def t(self) -> int:
        """Number of observations absorbed so far"""
        return self.ensemble.t

    def __repr__(self):
        return f"FilterState(t={self.t}, ensemble={self.ensemble!r})"


class ImportanceWeights:  # pylint: disable=too-few-public-methods
    """Normalized importance weights and the log mean likelihood they came from"""

    def __init__(self, values: np.ndarray, log_mean_likelihood: float = 0.0) -> None:
        self.values: np.ndarray = np.asarray(values, dtype=float)
        self.log_mean_likelihood: float = float(log_mean_likelihood)

    def __len__(self):
        return len(self.values)

    def __repr__(self):
        return (
            f"ImportanceWeights(values={self.values.tolist()}, "
            f"log_mean_likelihood={self.log_mean_likelihood})"
        )


class PosteriorSummary:  # pylint: disable=too-few-public-methods
    """Sample summary of the posterior at one step"""

    def __init__(  # pylint: disable=too-many-arguments
        self,
        mean: np.ndarray,
        std: np.ndarray,
        ess: float,
        log_marginal_increment: float,
        t: int = 0,
        abs_error: Optional[float] = None,
    ) -> None:
        self.mean: np.ndarray = np.atleast_1d(mean)
        self.std: np.ndarray = np.atleast_1d(std)
        self.ess: float = float(ess)
        self.log_marginal_increment: float = float(log_marginal_increment)
        self.t: int = t
        self.abs_error: Optional[float] = abs_error

    def __repr__(self):
        return (
            f"PosteriorSummary(t={self.t}, mean={self.mean.tolist()}, std={self.std.tolist()}, "
            f"ess={self.ess}, log_marginal_increment={self.log_marginal_increment}, "
            f"abs_error={self.abs_error})"
        )


def weigh(ensemble: Ensemble, y, obs_model: ObservationModel) -> ImportanceWeights:
    """Weigh every particle by p(y | z), normalized in log space"""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not np.all(np.isfinite(y)):
        raise InvalidParameter(f"observation must be finite, got {y.tolist()}")

    log_likelihoods = obs_model.log_likelihoods(y, ensemble.samples)
    peak = np.max(log_likelihoods)
    if not math.isfinite(peak):
        raise DegenerateWeights(
            f"all likelihoods vanish at step {ensemble.t + 1} (max log-likelihood {peak})"
        )

    unnormalized = np.exp(log_likelihoods - peak)
    values = unnormalized / unnormalized.sum()
    log_mean = float(logsumexp(log_likelihoods) - math.log(ensemble.size))
    return ImportanceWeights(values, log_mean)


def summarize(ensemble: Ensemble, weights: ImportanceWeights) -> PosteriorSummary:
    """Weighted mean, standard deviation, effective sample size and log marginal increment"""
    values = weights.values
    mean = values @ ensemble.samples
    variance = values @ (ensemble.samples - mean) ** 2
    ess = float(np.clip(1.0 / np.sum(values ** 2), 1.0, ensemble.size))
    return PosteriorSummary(
        mean, np.sqrt(np.maximum(variance, 0.0)), ess, weights.log_mean_likelihood, ensemble.t + 1
    )


def resample_indices(
    weights: np.ndarray, count: int, rng: np.random.Generator, scheme: str = "multinomial"
) -> np.ndarray:
    """Draw `count` particle indices according to normalized weights"""
    size = len(weights)
    cumulative = np.cumsum(weights)
    cumulative[-1] = 1.0  # ensures sum is exactly one

    if scheme == "multinomial":
        positions = rng.random(count)
    elif scheme == "systematic":
        positions = (rng.random() + np.arange(count)) / max(count, 1)
    elif scheme == "stratified":
        positions = (rng.random(count) + np.arange(count)) / max(count, 1)
    elif scheme == "residual":
        copies = np.floor(count * weights).astype(np.int64)
        indices = np.repeat(np.arange(size), copies)
        remaining = count - len(indices)
        if remaining == 0:
            return indices
        residual = count * weights - copies
        residual_cumulative = np.cumsum(residual / residual.sum())
        residual_cumulative[-1] = 1.0
        extra = np.searchsorted(residual_cumulative, rng.random(remaining), side="right")
        return np.concatenate([indices, np.minimum(extra, size - 1)])
    else:
        raise InvalidParameter(f"resampling must be one of {RESAMPLING_SCHEMES}, got {scheme!r}")

    return np.minimum(np.searchsorted(cumulative, positions, side="right"), size - 1)


def resample_mix(  # pylint: disable=too-many-arguments
    ensemble: Ensemble,
    weights: ImportanceWeights,
    beta: float,
    noise_std: Union[float, np.ndarray],
    rng: np.random.Generator,
    kernel: Optional[TransitionKernel] = None,
    scheme: str = "multinomial",
) -> Ensemble:
    """Build the next predictive ensemble

    round(L * beta) slots, chosen without replacement, are overwritten by
    posterior draws (pushed through the kernel when one is given) and get
    birth t + 1. Zero-mean Gaussian noise is then added to all L particles."""
    size = ensemble.size
    replaced = replacement_count(size, beta)

    slots = rng.choice(size, size=replaced, replace=False)
    picks = resample_indices(weights.values, replaced, rng, scheme)
    fresh = ensemble.samples[picks]
    if kernel is not None:
        fresh = kernel.sample(fresh, rng)

    samples = ensemble.samples.copy()
    birth = ensemble.birth.copy()
    samples[slots] = fresh
    birth[slots] = ensemble.t + 1

    noise_std = np.atleast_1d(np.asarray(noise_std, dtype=float))
    if np.any(noise_std > 0):
        samples += rng.normal(0.0, 1.0, size=samples.shape) * noise_std

    LOGGER.debug("Step %s: refreshed %s of %s particles", ensemble.t + 1, replaced, size)
    return Ensemble(samples, birth, t=ensemble.t + 1)


def filter_step(
    state: FilterState, y, config: FilterConfig, rng: np.random.Generator
) -> Tuple[FilterState, PosteriorSummary]:
    """Weigh, summarise, then resample-and-mix; the summary is taken before noise

    On DegenerateWeights the given state is left untouched."""
    weights = weigh(state.ensemble, y, config.obs_model)
    summary = summarize(state.ensemble, weights)
    LOGGER.debug("Step %s: ess %s, mean %s", summary.t, summary.ess, summary.mean)
    ensemble = resample_mix(
        state.ensemble,
        weights,
        config.beta,
        config.noise_std,
        rng,
        kernel=config.kernel,
        scheme=config.resampling,
    )
    return FilterState(ensemble), summary


class FilterTrace:
    """Posterior summaries of a filter run, one per observation, and the final state"""

    def __init__(self, summaries: List[PosteriorSummary], state: FilterState) -> None:
        self.summaries: List[PosteriorSummary] = summaries
        self.state: FilterState = state

    def __getitem__(self, index):
        return self.summaries[index]

    def __iter__(self) -> Iterator[PosteriorSummary]:
        return iter(self.summaries)

    def __len__(self):
        return len(self.summaries)

    @property
    def means(self) -> np.ndarray:
        """(T, d) array of posterior means"""
        return np.array([summary.mean for summary in self.summaries])

    @property
    def stds(self) -> np.ndarray:
        """(T, d) array of posterior standard deviations"""
        return np.array([summary.std for summary in self.summaries])

    def __repr__(self):
        return f"FilterTrace(steps={len(self.summaries)}, state={self.state!r})"


def _checked_observation(index: int, record: ObservationRecord, dimension: int) -> np.ndarray:
    if record.dimension != dimension:
        raise InputError(
            f"record {index} has dimension {record.dimension}, expected {dimension}"
        )
    if not np.all(np.isfinite(record.y)):
        raise InputError(f"record {index} holds a non-finite observation {record.y.tolist()}")
    return record.y


def run_filter(config: FilterConfig, observations: Iterable[ObservationRecord]) -> FilterTrace:
    """Filter a stream of observation records

    The prior ensemble is the prediction for the first observation, no system
    noise is applied before the first weighing."""
    rng = make_rng(config.seed)
    state = FilterState(init_ensemble(config.particles, config.prior, rng))
    summaries: List[PosteriorSummary] = []

    for index, record in enumerate(observations):
        y = _checked_observation(index, record, config.dimension)
        state, summary = filter_step(state, y, config, rng)
        summary.t = record.t
        if record.truth is not None:
            summary.abs_error = float(np.abs(summary.mean - record.truth).max())
        summaries.append(summary)

    if not summaries:
        raise NoData("no observations to filter")

    LOGGER.debug("Filtered %s observations with %r", len(summaries), config)
    return FilterTrace(summaries, state)
