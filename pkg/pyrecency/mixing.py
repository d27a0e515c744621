"""This module contains code that handles recency-decay mixing coefficients

The mixing coefficient of lag m decays geometrically with the rate of decrease
beta, theta_m = alpha * theta0 * (1 - beta) ** m, where alpha normalizes the
coefficients over the horizon. A fixed budget of samples is split across the
lags by largest-remainder apportionment.
"""

import logging
import math
from typing import Iterator, Optional, Union

import numpy as np

from pyrecency.errors import InvalidParameter, NonNormalizable

LOGGER = logging.getLogger(__name__)

TRUNCATION_EPSILON = 1e-12


class Unbounded:  # pylint: disable=too-few-public-methods
    """Marks a horizon that reaches infinitely far into the past"""

    def __repr__(self):
        return "Unbounded"

    def __eq__(self, other):
        return isinstance(other, Unbounded)

    def __hash__(self):
        return hash("Unbounded")


UNBOUNDED = Unbounded()

Horizon = Union[int, Unbounded]


def _check_beta(beta: float) -> None:
    if not isinstance(beta, (int, float)) or not math.isfinite(beta) or not 0.0 <= beta <= 1.0:
        raise InvalidParameter(f"beta must lie in [0, 1], got {beta!r}")


class DecaySpec:  # pylint: disable=too-few-public-methods
    """Parameters of the recency decay: rate of decrease, base coefficient and horizon

    theta0 cancels under normalization; it is kept so that the unnormalized
    coefficients can be reported as they are written down."""

    def __init__(self, beta: float, theta0: float = 1.0, horizon: Horizon = UNBOUNDED) -> None:
        _check_beta(beta)
        if not math.isfinite(theta0) or theta0 <= 0:
            raise InvalidParameter(f"theta0 must be positive, got {theta0!r}")
        if not isinstance(horizon, Unbounded) and (
            not isinstance(horizon, (int, np.integer)) or horizon < 1
        ):
            raise InvalidParameter(f"horizon must be a positive integer, got {horizon!r}")
        if beta == 0:
            LOGGER.warning("beta = 0 freezes the mixture: every lag contributes equally")

        self.beta: float = float(beta)
        self.theta0: float = float(theta0)
        self.horizon: Horizon = horizon if isinstance(horizon, Unbounded) else int(horizon)

    @property
    def bounded(self) -> bool:
        """True if the horizon is a finite number of lags"""
        return not isinstance(self.horizon, Unbounded)

    def with_horizon(self, horizon: Horizon) -> "DecaySpec":
        """Return a copy of this spec with a different horizon"""
        return DecaySpec(self.beta, self.theta0, horizon)

    def __eq__(self, other):
        return (
            isinstance(other, DecaySpec)
            and self.beta == other.beta
            and self.theta0 == other.theta0
            and self.horizon == other.horizon
        )

    def __repr__(self):
        return f"DecaySpec(beta={self.beta}, theta0={self.theta0}, horizon={self.horizon!r})"


class MixingWeights:
    """Mixing coefficients theta_1..theta_M; position 0 holds lag 1

    For a truncated unbounded series, `tail` holds the mass of all lags beyond
    the stored prefix so that sum(weights) + tail == 1."""

    def __init__(self, weights: np.ndarray, tail: float = 0.0) -> None:
        self._weights: np.ndarray = np.array(weights, dtype=float)
        self._weights.setflags(write=False)
        self.tail: float = float(tail)

    @property
    def weights(self) -> np.ndarray:
        """Read-only array of coefficients, index 0 is lag 1"""
        return self._weights

    def lag(self, lag: int) -> float:
        """Return theta for a 1-based lag"""
        return float(self._weights[lag - 1])

    def __len__(self):
        return len(self._weights)

    def __iter__(self):
        return iter(self._weights.tolist())

    def __repr__(self):
        return f"MixingWeights(weights={self._weights.tolist()}, tail={self.tail})"


class Allocation:
    """Integer number of samples assigned to each lag; position 0 holds lag 1"""

    def __init__(self, counts: np.ndarray) -> None:
        self._counts: np.ndarray = np.array(counts, dtype=np.int64)
        self._counts.setflags(write=False)

    @property
    def counts(self) -> np.ndarray:
        """Read-only array of per-lag sample counts"""
        return self._counts

    @property
    def total(self) -> int:
        """Total number of allocated samples"""
        return int(self._counts.sum())

    def __len__(self):
        return len(self._counts)

    def __iter__(self):
        return iter(self._counts.tolist())

    def __repr__(self):
        return f"Allocation(counts={self._counts.tolist()})"


def unbounded_weights(beta: float) -> Iterator[float]:
    """Lazily yield the closed form beta * (1 - beta) ** (m - 1) for m = 1, 2, ..."""
    _check_beta(beta)
    if beta == 0:
        raise NonNormalizable("beta = 0 with an unbounded horizon does not normalize")

    def _series() -> Iterator[float]:
        current = beta
        while True:
            yield current
            current *= 1.0 - beta

    return _series()


def effective_horizon(beta: float, epsilon: float) -> int:
    """Return the smallest horizon M whose discarded tail (1 - beta) ** M is below epsilon"""
    _check_beta(beta)
    if beta == 0:
        raise NonNormalizable("beta = 0 has no finite effective horizon")
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameter(f"epsilon must lie in (0, 1), got {epsilon!r}")

    if beta == 1:
        return 1

    decay = 1.0 - beta
    horizon = max(1, math.ceil(math.log(epsilon) / math.log1p(-beta)))
    # log rounding may leave the estimate one off in either direction
    while horizon > 1 and decay ** (horizon - 1) < epsilon:
        horizon -= 1
    while decay ** horizon >= epsilon:
        horizon += 1

    LOGGER.debug("Effective horizon for beta=%s, epsilon=%s: %s", beta, epsilon, horizon)
    return horizon


def mixing_weights(spec: DecaySpec, length: Optional[int] = None) -> MixingWeights:
    """Return normalized mixing coefficients for a decay spec

    A finite horizon M normalizes theta0 * (1 - beta) ** m over m = 1..M. An
    unbounded horizon returns the closed form beta * (1 - beta) ** (m - 1),
    truncated at `length` lags (default: the effective horizon at 1e-12)."""
    beta = spec.beta

    if isinstance(spec.horizon, Unbounded):
        if beta == 0:
            raise NonNormalizable("beta = 0 with an unbounded horizon does not normalize")
        if length is None:
            length = effective_horizon(beta, TRUNCATION_EPSILON)
        if length < 1:
            raise InvalidParameter(f"length must be positive, got {length!r}")
        lags = np.arange(length)
        weights = beta * np.power(1.0 - beta, lags)
        return MixingWeights(weights, tail=(1.0 - beta) ** length)

    horizon = spec.horizon
    if beta == 0:
        weights = np.full(horizon, 1.0 / horizon)
    elif beta == 1:
        weights = np.zeros(horizon)
        weights[0] = 1.0
    else:
        unnormalized = spec.theta0 * np.power(1.0 - beta, np.arange(1, horizon + 1))
        alpha = 1.0 / unnormalized.sum()
        weights = alpha * unnormalized

    LOGGER.debug("Mixing weights for %r: %s", spec, weights)
    return MixingWeights(weights)


def allocate_samples(total: int, weights: MixingWeights) -> Allocation:
    """Split `total` samples across lags by largest-remainder apportionment

    Every lag first receives the floor of its quota; the leftover units go to
    the largest fractional parts, lower lags first on ties."""
    if isinstance(total, bool) or not isinstance(total, (int, np.integer)) or total < 1:
        raise InvalidParameter(f"sample budget must be a positive integer, got {total!r}")
    if len(weights) == 0:
        raise InvalidParameter("cannot allocate samples across zero components")

    theta = weights.weights / weights.weights.sum()
    quotas = theta * total
    counts = np.floor(quotas).astype(np.int64)
    leftover = int(total - counts.sum())
    if leftover > 0:
        order = np.argsort(-(quotas - counts), kind="stable")
        counts[order[:leftover]] += 1

    LOGGER.debug("Allocated %s samples as %s", total, counts)
    return Allocation(counts)
