"""This module contains plug-in priors, transition kernels, observation models and generators"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import expit

from pyrecency.errors import InvalidParameter
from pyrecency.seeding import Seed, make_rng

LOGGER = logging.getLogger(__name__)

State = Union[float, np.ndarray]


def _check_dimension(dimension: int) -> int:
    if isinstance(dimension, bool) or not isinstance(dimension, (int, np.integer)) or dimension < 1:
        raise InvalidParameter(f"dimension must be a positive integer, got {dimension!r}")
    return int(dimension)


def _finite(name: str, value: float) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidParameter(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value):
        raise InvalidParameter(f"{name} must be finite, got {value!r}")
    return value


def _split_spec(text: str) -> Tuple[str, List[str]]:
    kind, _, arguments = text.strip().partition(":")
    return kind.strip(), [arg.strip() for arg in arguments.split(",") if arg.strip()]


def _floats(text: str, arguments: List[str], count: int) -> List[float]:
    if len(arguments) != count:
        raise InvalidParameter(f"'{text}' expects {count} argument(s), got {len(arguments)}")
    return [_finite(text, arg) for arg in arguments]


class Prior:
    """Distribution the initial ensemble is drawn from"""

    kind: str = "prior"

    def __init__(self, dimension: int = 1) -> None:
        self.dimension: int = _check_dimension(dimension)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Return `count` draws as a (count, dimension) array"""
        raise NotImplementedError  # pragma: no cover

    def moments(self) -> Tuple[float, float]:
        """Return per-dimension mean and variance"""
        raise NotImplementedError  # pragma: no cover


class NormalPrior(Prior):
    """Independent normal prior in every dimension"""

    kind = "normal"

    def __init__(self, mean: float = 0.0, std: float = 1.0, dimension: int = 1) -> None:
        super().__init__(dimension)
        self.mean: float = _finite("mean", mean)
        self.std: float = _finite("std", std)
        if self.std < 0:
            raise InvalidParameter(f"prior std must be nonnegative, got {std!r}")

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.normal(self.mean, self.std, size=(count, self.dimension))

    def moments(self) -> Tuple[float, float]:
        return self.mean, self.std ** 2

    def __repr__(self):
        return f"NormalPrior(mean={self.mean}, std={self.std}, dimension={self.dimension})"


class PointMassPrior(Prior):
    """All mass on a single value"""

    kind = "point"

    def __init__(self, value: float, dimension: int = 1) -> None:
        super().__init__(dimension)
        self.value: float = _finite("value", value)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return np.full((count, self.dimension), self.value)

    def moments(self) -> Tuple[float, float]:
        return self.value, 0.0

    def __repr__(self):
        return f"PointMassPrior(value={self.value}, dimension={self.dimension})"


class UniformPrior(Prior):
    """Independent uniform prior on [low, high) in every dimension"""

    kind = "uniform"

    def __init__(self, low: float, high: float, dimension: int = 1) -> None:
        super().__init__(dimension)
        self.low: float = _finite("low", low)
        self.high: float = _finite("high", high)
        if self.high <= self.low:
            raise InvalidParameter(f"uniform prior needs low < high, got [{low}, {high})")

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return rng.uniform(self.low, self.high, size=(count, self.dimension))

    def moments(self) -> Tuple[float, float]:
        return (self.low + self.high) / 2, (self.high - self.low) ** 2 / 12

    def __repr__(self):
        return f"UniformPrior(low={self.low}, high={self.high}, dimension={self.dimension})"


def parse_prior(text: str, dimension: int = 1) -> Prior:
    """Parse 'normal:MEAN,STD', 'point:VALUE' or 'uniform:LOW,HIGH'"""
    kind, arguments = _split_spec(text)
    if kind == "normal":
        mean, std = _floats(text, arguments, 2) if arguments else (0.0, 1.0)
        return NormalPrior(mean, std, dimension)
    if kind == "point":
        (value,) = _floats(text, arguments, 1)
        return PointMassPrior(value, dimension)
    if kind == "uniform":
        low, high = _floats(text, arguments, 2)
        return UniformPrior(low, high, dimension)
    raise InvalidParameter(f"Unknown prior '{text}'")


class TransitionKernel:
    """State transition h applied to parent states; works on arrays of any shape"""

    kind: str = "kernel"

    def __init__(self, dimension: int = 1) -> None:
        self.dimension: int = _check_dimension(dimension)

    def sample(self, parents: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Return one child state per parent"""
        raise NotImplementedError  # pragma: no cover


class IdentityKernel(TransitionKernel):
    """Child equals parent"""

    kind = "identity"

    def sample(self, parents: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return np.array(parents, dtype=float, copy=True)

    def __repr__(self):
        return f"IdentityKernel(dimension={self.dimension})"


class LinearKernel(TransitionKernel):
    """Child is the parent scaled by a"""

    kind = "linear"

    def __init__(self, coefficient: float, dimension: int = 1) -> None:
        super().__init__(dimension)
        self.coefficient: float = _finite("coefficient", coefficient)

    def sample(self, parents: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return self.coefficient * np.asarray(parents, dtype=float)

    def __repr__(self):
        return f"LinearKernel(coefficient={self.coefficient}, dimension={self.dimension})"


class RandomWalkKernel(TransitionKernel):
    """Child is the parent plus zero-mean Gaussian noise"""

    kind = "random_walk"

    def __init__(self, std: float, dimension: int = 1) -> None:
        super().__init__(dimension)
        self.std: float = _finite("std", std)
        if self.std < 0:
            raise InvalidParameter(f"random walk std must be nonnegative, got {std!r}")

    def sample(self, parents: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        parents = np.asarray(parents, dtype=float)
        return parents + rng.normal(0.0, self.std, size=parents.shape)

    def __repr__(self):
        return f"RandomWalkKernel(std={self.std}, dimension={self.dimension})"


def parse_kernel(text: str, dimension: int = 1) -> TransitionKernel:
    """Parse 'identity', 'linear:A' or 'random_walk:STD'"""
    kind, arguments = _split_spec(text)
    if kind == "identity":
        _floats(text, arguments, 0)
        return IdentityKernel(dimension)
    if kind == "linear":
        (coefficient,) = _floats(text, arguments, 1)
        return LinearKernel(coefficient, dimension)
    if kind == "random_walk":
        (std,) = _floats(text, arguments, 1)
        return RandomWalkKernel(std, dimension)
    raise InvalidParameter(f"Unknown transition kernel '{text}'")


def kernel_sample(kernel: TransitionKernel, parent: State, rng: np.random.Generator) -> State:
    """Draw a single child state of `parent`"""
    child = kernel.sample(np.asarray(parent, dtype=float), rng)
    return float(child) if np.ndim(child) == 0 else child


class ObservationModel:
    """Likelihood p(y | z) of an observation given latent states"""

    kind: str = "observation"

    def __init__(self, dimension: int = 1) -> None:
        self.dimension: int = _check_dimension(dimension)

    def log_likelihoods(self, y: np.ndarray, particles: np.ndarray) -> np.ndarray:
        """Return log p(y | z_l) for every row z_l of an (L, dimension) array"""
        raise NotImplementedError  # pragma: no cover

    def sample(self, truth: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw observations for an array of latent values"""
        raise NotImplementedError  # pragma: no cover


class GaussianObservation(ObservationModel):
    """y = z + N(0, std^2), independently per dimension"""

    kind = "gaussian"

    def __init__(self, std: float, dimension: int = 1) -> None:
        super().__init__(dimension)
        self.std: float = _finite("std", std)
        if self.std <= 0:
            raise InvalidParameter(f"observation std must be positive, got {std!r}")

    def log_likelihoods(self, y: np.ndarray, particles: np.ndarray) -> np.ndarray:
        residual = (np.asarray(particles, dtype=float) - np.asarray(y, dtype=float)) / self.std
        normalizer = math.log(self.std * math.sqrt(2 * math.pi))
        return np.sum(-0.5 * residual ** 2 - normalizer, axis=-1)

    def sample(self, truth: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return truth + rng.normal(0.0, self.std, size=np.shape(truth))

    def __repr__(self):
        return f"GaussianObservation(std={self.std}, dimension={self.dimension})"


class BernoulliLogitObservation(ObservationModel):
    """y in {0, 1} with P(y = 1) = sigmoid(z), independently per dimension"""

    kind = "bernoulli_logit"

    def log_likelihoods(self, y: np.ndarray, particles: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if np.any((y != 0) & (y != 1)):
            raise InvalidParameter(f"bernoulli observations must be 0 or 1, got {y.tolist()}")
        particles = np.asarray(particles, dtype=float)
        # log sigmoid(z) = -log(1 + exp(-z))
        log_p = -np.logaddexp(0.0, -particles)
        log_q = -np.logaddexp(0.0, particles)
        return np.sum(y * log_p + (1 - y) * log_q, axis=-1)

    def sample(self, truth: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return (rng.random(np.shape(truth)) < expit(truth)).astype(float)

    def __repr__(self):
        return f"BernoulliLogitObservation(dimension={self.dimension})"


def parse_model(text: str, dimension: int = 1) -> ObservationModel:
    """Parse 'gaussian:STD' or 'bernoulli_logit'"""
    kind, arguments = _split_spec(text)
    if kind == "gaussian":
        (std,) = _floats(text, arguments, 1) if arguments else (1.0,)
        return GaussianObservation(std, dimension)
    if kind == "bernoulli_logit":
        _floats(text, arguments, 0)
        return BernoulliLogitObservation(dimension)
    raise InvalidParameter(f"Unknown observation model '{text}'")


def log_likelihood(model: ObservationModel, y: State, z: State) -> float:
    """Return log p(y | z) for a single observation and state"""
    y_array = np.atleast_1d(np.asarray(y, dtype=float))
    z_array = np.atleast_1d(np.asarray(z, dtype=float))
    if not (np.all(np.isfinite(y_array)) and np.all(np.isfinite(z_array))):
        raise InvalidParameter(f"log-likelihood needs finite inputs, got y={y!r}, z={z!r}")
    if y_array.shape != z_array.shape:
        raise InvalidParameter(f"y has shape {y_array.shape} but z has shape {z_array.shape}")
    return float(model.log_likelihoods(y_array, z_array.reshape(1, -1))[0])


class ObservationRecord:  # pylint: disable=too-few-public-methods
    """Timestamped observation vector with an optional ground-truth latent state"""

    def __init__(self, t: int, y: State, truth: Optional[State] = None) -> None:
        self.t: int = int(t)
        self.y: np.ndarray = np.atleast_1d(np.asarray(y, dtype=float))
        self.truth: Optional[np.ndarray] = (
            None if truth is None else np.atleast_1d(np.asarray(truth, dtype=float))
        )

    @property
    def dimension(self) -> int:
        """Dimension of the observation vector"""
        return len(self.y)

    def to_dict(self) -> Dict:
        """Return a JSON-ready mapping; scalars stay scalars"""

        def _plain(values: np.ndarray) -> Union[float, List[float]]:
            return float(values[0]) if len(values) == 1 else [float(v) for v in values]

        record: Dict = {"t": self.t, "y": _plain(self.y)}
        if self.truth is not None:
            record["truth"] = _plain(self.truth)
        return record

    def __eq__(self, other):
        return (
            isinstance(other, ObservationRecord)
            and self.t == other.t
            and np.array_equal(self.y, other.y)
            and (
                (self.truth is None and other.truth is None)
                or (
                    self.truth is not None
                    and other.truth is not None
                    and np.array_equal(self.truth, other.truth)
                )
            )
        )

    def __repr__(self):
        truth = None if self.truth is None else self.truth.tolist()
        return f"ObservationRecord(t={self.t}, y={self.y.tolist()}, truth={truth})"


GENERATOR_KINDS = ("changepoint", "drift", "sinusoid")
OBSERVATION_KINDS = ("gaussian", "bernoulli")


class GeneratorSpec:  # pylint: disable=too-few-public-methods,too-many-instance-attributes
    """Synthetic ground-truth stream: latent path kind, observation noise, length and seed

    changepoint: piecewise constant truth, levels[i] from times[i-1] on
    drift: Gaussian random walk truth starting at 0
    sinusoid: truth = amplitude * cos(2 * pi * t / period)
    """

    def __init__(  # pylint: disable=too-many-arguments
        self,
        kind: str,
        length: int,
        seed: int = 0,
        obs_std: float = 1.0,
        levels: Sequence[float] = (0.0,),
        times: Sequence[int] = (),
        drift_std: float = 0.0,
        amplitude: float = 1.0,
        period: float = 20.0,
        observation: str = "gaussian",
    ) -> None:
        if kind not in GENERATOR_KINDS:
            raise InvalidParameter(f"generator kind must be one of {GENERATOR_KINDS}, got {kind!r}")
        if observation not in OBSERVATION_KINDS:
            raise InvalidParameter(
                f"generator observation must be one of {OBSERVATION_KINDS}, got {observation!r}"
            )
        if isinstance(length, bool) or not isinstance(length, (int, np.integer)) or length < 1:
            raise InvalidParameter(f"generator length must be a positive integer, got {length!r}")
        if _finite("obs_std", obs_std) < 0:
            raise InvalidParameter(f"obs_std must be nonnegative, got {obs_std!r}")

        self.kind: str = kind
        self.length: int = int(length)
        self.seed: int = seed
        self.obs_std: float = float(obs_std)
        self.levels: Tuple[float, ...] = tuple(_finite("level", level) for level in levels)
        self.times: Tuple[int, ...] = tuple(int(time) for time in times)
        self.drift_std: float = _finite("drift_std", drift_std)
        self.amplitude: float = _finite("amplitude", amplitude)
        self.period: float = _finite("period", period)
        self.observation: str = observation

        if kind == "changepoint":
            if len(self.levels) != len(self.times) + 1:
                raise InvalidParameter("changepoint needs exactly one more level than times")
            if any(later <= earlier for earlier, later in zip(self.times, self.times[1:])):
                raise InvalidParameter(f"changepoint times must increase strictly: {self.times}")
        if self.drift_std < 0:
            raise InvalidParameter(f"drift std must be nonnegative, got {drift_std!r}")
        if kind == "sinusoid" and self.period <= 0:
            raise InvalidParameter(f"sinusoid period must be positive, got {period!r}")

    def describe(self) -> Dict:
        """Return the parameters relevant to this generator kind"""
        described: Dict = {
            "kind": self.kind,
            "length": self.length,
            "seed": self.seed,
            "obs_std": self.obs_std,
            "observation": self.observation,
        }
        if self.kind == "changepoint":
            described.update(levels=list(self.levels), times=list(self.times))
        elif self.kind == "drift":
            described.update(drift_std=self.drift_std)
        else:
            described.update(amplitude=self.amplitude, period=self.period)
        return described

    def __repr__(self):
        return f"GeneratorSpec({self.describe()})"


def parse_generator(
    text: str, length: int, seed: int = 0, obs_std: float = 1.0, observation: str = "gaussian"
) -> GeneratorSpec:
    """Parse 'changepoint:L0,L1,...@T1,...', 'drift:STD' or 'sinusoid:AMP,PERIOD'"""
    kind, _, arguments = text.strip().partition(":")
    common = dict(length=length, seed=seed, obs_std=obs_std, observation=observation)
    if kind == "changepoint":
        levels, _, times = arguments.partition("@")
        return GeneratorSpec(
            "changepoint",
            levels=[_finite(text, level) for level in levels.split(",") if level.strip()],
            times=[int(_finite(text, time)) for time in times.split(",") if time.strip()],
            **common,
        )
    if kind == "drift":
        (drift_std,) = _floats(text, _split_spec(text)[1], 1)
        return GeneratorSpec("drift", drift_std=drift_std, **common)
    if kind == "sinusoid":
        amplitude, period = _floats(text, _split_spec(text)[1], 2)
        return GeneratorSpec("sinusoid", amplitude=amplitude, period=period, **common)
    raise InvalidParameter(f"Unknown generator '{text}'")


def _latent_path(spec: GeneratorSpec, rng: np.random.Generator) -> np.ndarray:
    steps = np.arange(spec.length)
    if spec.kind == "changepoint":
        return np.asarray(spec.levels)[np.searchsorted(spec.times, steps, side="right")]
    if spec.kind == "drift":
        increments = rng.normal(0.0, spec.drift_std, size=spec.length)
        increments[0] = 0.0
        return np.cumsum(increments)
    return spec.amplitude * np.cos(2 * np.pi * steps / spec.period)


def generate(spec: GeneratorSpec, seed: Optional[Seed] = None) -> List[ObservationRecord]:
    """Generate records t = 0..T-1 carrying both the observation and the truth"""
    rng = make_rng(spec.seed if seed is None else seed)
    truth = _latent_path(spec, rng)

    if spec.observation == "bernoulli":
        observed = BernoulliLogitObservation().sample(truth, rng)
    elif spec.obs_std > 0:
        observed = GaussianObservation(spec.obs_std).sample(truth, rng)
    else:
        observed = truth.copy()

    LOGGER.debug("Generated %s records from %r", spec.length, spec)
    return [ObservationRecord(t, y, z) for t, (y, z) in enumerate(zip(observed, truth))]
