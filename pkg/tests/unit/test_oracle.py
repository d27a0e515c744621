# pylint: disable=missing-docstring, no-self-use, too-few-public-methods

import numpy as np
import pytest
from pytest import raises

import pyrecency.mixing as pmix
import pyrecency.models as pmod
import pyrecency.oracle as por
from pyrecency.errors import InvalidParameter, InvalidState, Unsupported
from helpers import labelled_history, value_counts


class TestHistoryBank:
    def test_sanity(self):
        history = por.HistoryBank()
        assert len(history) == 0
        history.append(np.zeros(4))
        history.append(np.ones((4, 1)))
        assert len(history) == 2
        assert history.t == 1
        assert history[1].shape == (4, 1)
        assert history.nbytes == 2 * 4 * 8

    def test_grows_with_time(self):
        history = por.run_oracle(10, 16, 0.5, pmod.IdentityKernel(), pmod.NormalPrior(), 0)
        assert len(history) == 11
        assert history.nbytes == 11 * 16 * 8


class TestExplicitMixture:
    def test_component_sizes(self):
        history = labelled_history(6, 100)
        spec = pmix.DecaySpec(0.5, horizon=5)
        samples = por.explicit_mixture(
            history, spec, 100, pmod.IdentityKernel(), np.random.default_rng(0)
        )
        assert samples.shape == (100, 1)
        assert value_counts(samples) == {5.0: 52, 4.0: 26, 3.0: 13, 2.0: 6, 1.0: 3}

    def test_first_order(self):
        history = labelled_history(4, 10)
        samples = por.explicit_mixture(
            history, pmix.DecaySpec(1.0), 10, pmod.IdentityKernel(), np.random.default_rng(0)
        )
        assert value_counts(samples) == {3.0: 10}

    def test_single_bank(self):
        history = labelled_history(1, 10)
        samples = por.explicit_mixture(
            history, pmix.DecaySpec(0.3), 10, pmod.LinearKernel(2.0), np.random.default_rng(0)
        )
        assert value_counts(samples) == {0.0: 10}

    def test_short_history_renormalizes(self):
        history = labelled_history(3, 70)
        spec = pmix.DecaySpec(0.5, horizon=5)
        samples = por.explicit_mixture(
            history, spec, 70, pmod.IdentityKernel(), np.random.default_rng(0)
        )
        assert value_counts(samples) == {2.0: 40, 1.0: 20, 0.0: 10}

    def test_include_prior(self):
        history = labelled_history(2, 100)
        samples = por.explicit_mixture(
            history,
            pmix.DecaySpec(0.5),
            100,
            pmod.LinearKernel(10.0),
            np.random.default_rng(0),
            include_prior=True,
        )
        # lag 1 from bank 1, lag 2 from bank 0, the raw initial bank keeps the tail
        assert value_counts(samples) == {10.0: 50, 0.0: 50}

    def test_kernel_applied(self):
        history = labelled_history(2, 10)
        samples = por.explicit_mixture(
            history, pmix.DecaySpec(1.0), 10, pmod.LinearKernel(3.0), np.random.default_rng(0)
        )
        assert value_counts(samples) == {3.0: 10}

    def test_empty_history(self):
        with raises(InvalidState):
            por.explicit_mixture(
                por.HistoryBank(),
                pmix.DecaySpec(0.5),
                10,
                pmod.IdentityKernel(),
                np.random.default_rng(0),
            )


class TestOracleDistance:
    def test_point_mass(self):
        trace = por.oracle_vs_chain_distance(
            5, 50, 1.0, pmod.IdentityKernel(), pmod.PointMassPrior(2.0), 0
        )
        assert trace.distances == [0.0] * 5
        assert trace.baselines == [0.0] * 5
        assert trace.steps == [1, 2, 3, 4, 5]

    def test_vector_state_unsupported(self):
        with raises(Unsupported):
            por.oracle_vs_chain_distance(
                5, 50, 0.5, pmod.IdentityKernel(2), pmod.NormalPrior(dimension=2), 0
            )

    def test_shrinks_with_ensemble_size(self):
        kernel = pmod.RandomWalkKernel(1.0)
        small = por.oracle_vs_chain_distance(10, 100, 0.5, kernel, pmod.NormalPrior(), 0)
        large = por.oracle_vs_chain_distance(10, 10000, 0.5, kernel, pmod.NormalPrior(), 0)
        assert large.mean_distance < small.mean_distance
        assert all(distance >= 0 for distance in large.distances)

    @pytest.mark.slow
    def test_within_twice_the_self_distance(self):
        trace = por.oracle_vs_chain_distance(
            20, 10000, 0.5, pmod.IdentityKernel(), pmod.NormalPrior(), 0
        )
        assert len(trace.distances) == 20
        assert trace.mean_distance < 2 * trace.mean_baseline
        assert all(distance < 2 * max(trace.baselines) for distance in trace.distances)


class TestKalman:
    def test_single_update(self):
        belief = por.kalman_step(por.GaussianBelief(0.0, 1.0), 2.0, 1.0, 0.0)
        assert belief.mean[0] == pytest.approx(1.0)
        assert belief.variance == pytest.approx(0.5)

    def test_process_noise(self):
        belief = por.kalman_step(por.GaussianBelief(0.0, 1.0), 2.0, 1.0, 1.0)
        assert belief.mean[0] == pytest.approx(4.0 / 3.0)
        assert belief.variance == pytest.approx(2.0 / 3.0)

    def test_filter_skips_first_prediction(self):
        beliefs = por.kalman_filter(por.GaussianBelief(0.0, 1.0), [2.0, 2.0], 1.0, 1.0)
        assert beliefs[0].mean[0] == pytest.approx(1.0)
        assert beliefs[1].variance == pytest.approx(0.6)
        assert beliefs[1].mean[0] == pytest.approx(1.6)

    def test_invalid(self):
        belief = por.GaussianBelief(0.0, 1.0)
        with raises(InvalidParameter):
            por.kalman_step(belief, 1.0, 0.0, 0.0)
        with raises(InvalidParameter):
            por.kalman_step(belief, 1.0, 1.0, -1.0)
        with raises(InvalidParameter):
            por.GaussianBelief(0.0, -1.0)
        with raises(InvalidParameter):
            por.GaussianBelief([0.0, 0.0], [[1.0, 0.5], [0.0, 1.0]])
        with raises(Unsupported):
            por.kalman_step(por.GaussianBelief([0.0, 0.0], np.eye(2)), 1.0, 1.0, 0.0)
