# pylint: disable=missing-docstring, no-self-use, too-few-public-methods

import itertools
import logging

import numpy as np
import pytest
from pytest import raises

import pyrecency.mixing as pmix
from pyrecency.errors import InvalidParameter, NonNormalizable


class TestDecaySpec:
    def test_sanity(self):
        spec = pmix.DecaySpec(0.5, horizon=5)
        assert spec.beta == 0.5
        assert spec.theta0 == 1.0
        assert spec.horizon == 5
        assert spec.bounded
        assert not pmix.DecaySpec(0.5).bounded

    @pytest.mark.parametrize("beta", [-0.1, 1.5, float("nan"), float("inf")])
    def test_invalid_beta(self, beta):
        with raises(InvalidParameter):
            pmix.DecaySpec(beta)

    def test_invalid_theta0_and_horizon(self):
        with raises(InvalidParameter):
            pmix.DecaySpec(0.5, theta0=0.0)
        with raises(InvalidParameter):
            pmix.DecaySpec(0.5, horizon=0)
        with raises(InvalidParameter):
            pmix.DecaySpec(0.5, horizon=2.5)

    def test_boundaries_accepted(self, caplog):
        with caplog.at_level(logging.WARNING, logger="pyrecency.mixing"):
            frozen = pmix.DecaySpec(0.0, horizon=3)
        assert frozen.beta == 0.0
        assert "beta = 0" in caplog.text
        assert pmix.DecaySpec(1.0).beta == 1.0

    def test_with_horizon(self):
        spec = pmix.DecaySpec(0.3, theta0=2.0)
        assert spec.with_horizon(4) == pmix.DecaySpec(0.3, theta0=2.0, horizon=4)


class TestMixingWeights:
    def test_unbounded_closed_form(self):
        weights = pmix.mixing_weights(pmix.DecaySpec(0.5), length=3)
        assert list(weights) == [0.5, 0.25, 0.125]
        assert weights.tail == 0.125

    def test_single_component(self):
        for beta in (0.0, 0.3, 0.5, 1.0):
            assert list(pmix.mixing_weights(pmix.DecaySpec(beta, horizon=1))) == [1.0]

    def test_finite_horizon(self):
        weights = pmix.mixing_weights(pmix.DecaySpec(0.5, horizon=5))
        expected = [0.516129, 0.258065, 0.129032, 0.064516, 0.032258]
        assert np.allclose(weights.weights, expected, atol=1e-6)
        assert weights.lag(1) == pytest.approx(16 / 31)

    @pytest.mark.parametrize("beta", [0.05, 0.2, 0.5, 0.8, 0.99])
    def test_normalized_and_monotone(self, beta):
        weights = pmix.mixing_weights(pmix.DecaySpec(beta, horizon=12)).weights
        assert abs(weights.sum() - 1.0) <= 1e-12
        assert np.all(np.diff(weights) < 0)
        assert np.all(weights > 0)

    def test_theta0_cancels(self):
        plain = pmix.mixing_weights(pmix.DecaySpec(0.3, horizon=6))
        scaled = pmix.mixing_weights(pmix.DecaySpec(0.3, theta0=7.5, horizon=6))
        assert np.allclose(plain.weights, scaled.weights, rtol=0, atol=1e-15)

    def test_first_order_limit(self):
        weights = pmix.mixing_weights(pmix.DecaySpec(1.0, horizon=4))
        assert list(weights) == [1.0, 0.0, 0.0, 0.0]
        assert list(pmix.mixing_weights(pmix.DecaySpec(1.0), length=3)) == [1.0, 0.0, 0.0]

    def test_frozen_limit(self):
        assert list(pmix.mixing_weights(pmix.DecaySpec(0.0, horizon=4))) == [0.25] * 4

    def test_unbounded_frozen_is_rejected(self):
        with raises(NonNormalizable):
            pmix.mixing_weights(pmix.DecaySpec(0.0))

    @pytest.mark.parametrize("beta", [0.1, 0.3, 0.5, 0.9])
    def test_unbounded_matches_renormalized_finite(self, beta):
        horizon = pmix.effective_horizon(beta, 1e-12)
        finite = pmix.mixing_weights(pmix.DecaySpec(beta, horizon=horizon))
        closed = pmix.mixing_weights(pmix.DecaySpec(beta), length=horizon)
        assert np.allclose(finite.weights, closed.weights, rtol=0, atol=1e-9)

    def test_default_truncation(self):
        weights = pmix.mixing_weights(pmix.DecaySpec(0.5))
        assert len(weights) == pmix.effective_horizon(0.5, pmix.TRUNCATION_EPSILON)
        assert weights.weights.sum() + weights.tail == pytest.approx(1.0, abs=1e-12)

    def test_lazy_series(self):
        assert list(itertools.islice(pmix.unbounded_weights(0.2), 3)) == pytest.approx(
            [0.2, 0.16, 0.128]
        )
        with raises(NonNormalizable):
            pmix.unbounded_weights(0.0)


class TestEffectiveHorizon:
    def test_examples(self):
        assert pmix.effective_horizon(1.0, 0.01) == 1
        assert pmix.effective_horizon(0.5, 0.01) == 7
        assert pmix.effective_horizon(0.9, 0.001) == 3

    @pytest.mark.parametrize("beta,epsilon", [(0.1, 1e-6), (0.37, 1e-3), (0.75, 1e-12)])
    def test_smallest(self, beta, epsilon):
        horizon = pmix.effective_horizon(beta, epsilon)
        assert (1 - beta) ** horizon < epsilon
        assert horizon == 1 or (1 - beta) ** (horizon - 1) >= epsilon

    def test_errors(self):
        with raises(NonNormalizable):
            pmix.effective_horizon(0.0, 0.01)
        with raises(InvalidParameter):
            pmix.effective_horizon(0.5, 0.0)
        with raises(InvalidParameter):
            pmix.effective_horizon(0.5, 1.0)
        with raises(InvalidParameter):
            pmix.effective_horizon(1.2, 0.1)


class TestAllocateSamples:
    def test_equal_mixing(self):
        weights = pmix.MixingWeights(np.array([0.2, 0.2, 0.2, 0.2, 0.2]))
        assert list(pmix.allocate_samples(100, weights)) == [20, 20, 20, 20, 20]

    def test_single_component(self):
        assert list(pmix.allocate_samples(7, pmix.MixingWeights(np.array([1.0])))) == [7]

    def test_largest_remainder(self):
        weights = pmix.mixing_weights(pmix.DecaySpec(0.5, horizon=5))
        allocation = pmix.allocate_samples(100, weights)
        assert list(allocation) == [52, 26, 13, 6, 3]
        assert allocation.total == 100

    def test_halving_over_unbounded_series(self):
        allocation = pmix.allocate_samples(100, pmix.mixing_weights(pmix.DecaySpec(0.5)))
        assert allocation.counts[0] == 50
        assert allocation.counts[1] == 25
        assert allocation.total == 100

    def test_ties_favour_recent_lags(self):
        weights = pmix.MixingWeights(np.array([0.5, 0.5]))
        assert list(pmix.allocate_samples(3, weights)) == [2, 1]

    def test_random_weights(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            theta = rng.dirichlet(np.ones(rng.integers(1, 12)))
            total = int(rng.integers(1, 500))
            counts = pmix.allocate_samples(total, pmix.MixingWeights(theta)).counts
            assert counts.sum() == total
            assert np.all(np.abs(counts - theta * total) < 1)
            assert np.all(counts >= 0)

    def test_invalid_budget(self):
        weights = pmix.MixingWeights(np.array([1.0]))
        with raises(InvalidParameter):
            pmix.allocate_samples(0, weights)
        with raises(InvalidParameter):
            pmix.allocate_samples(True, weights)
