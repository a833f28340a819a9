import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import fresh_oracle, sweep_oracle
from sdm.belief import (
    FLOOR,
    DiffusionEstimator,
    RateEstimator,
    estimate_theta,
    floor_normalize,
    init_beliefs,
    observe_transition_error,
    predict,
    update,
)
from sdm.errors import ConfigurationError, DegenerateUpdateError


@pytest.mark.parametrize("n", [2, 4, 30])
def test_init_uniform(n):
    w = init_beliefs(n)
    assert w.shape == (n,)
    np.testing.assert_allclose(w, 1.0 / n)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


def test_init_matrix():
    w = init_beliefs(3, columns=2)
    assert w.shape == (3, 2)
    np.testing.assert_allclose(w, 1 / 6)


@pytest.mark.parametrize("n", [0, 1, -3])
def test_init_rejects_small(n):
    with pytest.raises(ConfigurationError):
        init_beliefs(n)


class TestPredict:
    def test_zero_theta_identity(self):
        prior = [1 / 3, 1 / 3, 1 / 3]
        np.testing.assert_array_equal(predict(prior, 0.0), prior)

    @pytest.mark.parametrize(
        "prior, expected",
        [
            ([1.0, 0.0, 0.0], [1.11, 0.1, 0.0]),
            ([0.0, 1.0, 0.0], [0.111, 1.11, 0.1]),
        ],
    )
    def test_hand_sweep(self, prior, expected):
        # expected values recomputed with sweep_oracle before freezing
        np.testing.assert_allclose(sweep_oracle(prior, 0.3), expected, atol=1e-15)
        np.testing.assert_allclose(predict(prior, 0.3), expected, atol=1e-15)

    def test_fresh_buffer(self):
        prior = [0.0, 1.0, 0.0]
        np.testing.assert_allclose(predict(prior, 0.3, "fresh-buffer"), [0.1, 1.1, 0.1], atol=1e-15)

    @settings(max_examples=200, deadline=None)
    @given(
        arrays(np.float64, st.integers(2, 40), elements=st.floats(0.0, 1.0)),
        st.floats(0.0, 2.0),
    )
    def test_matches_oracle(self, raw, theta):
        prior = raw + 1e-3
        prior /= prior.sum()
        np.testing.assert_allclose(predict(prior, theta), sweep_oracle(prior, theta), rtol=1e-13)
        np.testing.assert_allclose(predict(prior, theta, "fresh-buffer"), fresh_oracle(prior, theta), rtol=1e-13)

    def test_matrix_columns_independent(self, rng):
        prior = rng.random((6, 2))
        prior /= prior.sum()
        out = predict(prior, 0.7)
        for j in range(2):
            np.testing.assert_allclose(out[:, j], sweep_oracle(prior[:, j], 0.7), rtol=1e-14)

    def test_negative_theta(self):
        with pytest.raises(ConfigurationError):
            predict([0.5, 0.5], -0.1)

    def test_unknown_sweep(self):
        with pytest.raises(ConfigurationError):
            predict([0.5, 0.5], 0.1, "sideways")

    @settings(max_examples=200, deadline=None)
    @given(
        arrays(np.float64, st.integers(2, 30), elements=st.floats(1e-6, 1.0)),
        st.one_of(st.just(0.0), st.floats(1e-6, 2.0)),
    )
    def test_mass_inflation(self, raw, theta):
        prior = raw / raw.sum()
        total = predict(prior, theta).sum()
        if theta == 0:
            assert total == pytest.approx(1.0, abs=1e-12)
        else:
            assert total > 1.0


class TestUpdate:
    @pytest.mark.parametrize(
        "predicted, lik, expected",
        [
            ([0.5, 0.5], [1, 1], [0.5, 0.5]),
            ([0.2, 0.8], [4, 1], [0.5, 0.5]),
            ([1 / 3, 1 / 3, 1 / 3], [2, 1, 1], [0.5, 0.25, 0.25]),
        ],
    )
    def test_examples(self, predicted, lik, expected):
        np.testing.assert_allclose(update(predicted, lik), expected, rtol=1e-12)

    def test_scale_invariant_in_likelihood(self):
        a = update([0.1, 0.3, 0.6], [1.0, 2.0, 3.0])
        b = update([0.1, 0.3, 0.6], [1e-200, 2e-200, 3e-200])
        np.testing.assert_allclose(a, b, rtol=1e-12)

    def test_floor_applied(self):
        post = update([0.5, 0.5, 1e-30], [1.0, 1.0, 1.0])
        assert post.min() == FLOOR
        assert post.sum() == pytest.approx(1.0, abs=1e-15)

    def test_degenerate(self):
        with pytest.raises(DegenerateUpdateError, match="step 7"):
            update([0.5, 0.5], [0.0, 0.0], step_index=7)

    def test_shape_mismatch(self):
        with pytest.raises(ConfigurationError):
            update([0.5, 0.5], [1.0, 1.0, 1.0])

    @settings(max_examples=300, deadline=None)
    @given(arrays(np.float64, st.integers(2, 60), elements=st.floats(0.0, 1e3)))
    def test_floor_normalize_invariants(self, raw):
        raw = raw.copy()
        raw[0] += 1.0
        p = floor_normalize(raw)
        assert abs(p.sum() - 1.0) <= 1e-9
        assert p.min() >= FLOOR


@pytest.mark.parametrize(
    "prev, curr, expected",
    [
        ([0.2, 0.3, 0.5], [0.2, 0.3, 0.5], 0.0),
        ([1.0, 0.0], [0.0, 1.0], 2.0),
        ([0.5, 0.5], [0.75, 0.25], 0.5),
    ],
)
def test_transition_error(prev, curr, expected):
    assert observe_transition_error(prev, curr) == pytest.approx(expected, abs=1e-15)


def test_transition_error_mismatch():
    with pytest.raises(ConfigurationError):
        observe_transition_error([0.5, 0.5], [1.0])


class TestTheta:
    @pytest.mark.parametrize(
        "history, expected",
        [([], 0.0), ([0.4, 0.1, 0.2], 0.2), ([0.1, 0.3], 0.2)],
    )
    def test_examples(self, history, expected):
        assert estimate_theta(DiffusionEstimator(history)) == pytest.approx(expected, abs=1e-15)

    def test_median_oracle_random_histories(self, rng):
        for _ in range(1000):
            h = rng.uniform(0, 2, size=rng.integers(1, 60)).tolist()
            est = DiffusionEstimator()
            for v in h:
                est.add(v)
            s = sorted(h)
            n = len(s)
            brute = s[n // 2] if n % 2 else (s[n // 2 - 1] + s[n // 2]) / 2
            assert estimate_theta(est) == brute
            assert estimate_theta(est) == statistics.median(h)

    def test_rejects_out_of_range(self):
        with pytest.raises(ConfigurationError):
            DiffusionEstimator([2.5])
        with pytest.raises(ConfigurationError):
            DiffusionEstimator([-0.1])


class TestRate:
    def test_cold_start(self):
        assert RateEstimator().rate == 1.0

    def test_reciprocal_mean(self):
        r = RateEstimator()
        for u2 in (0.5, 1.5, 1.0):
            r.add(u2)
        assert r.rate == pytest.approx(1.0)
        assert r.count == 3 and r.residual_sum == pytest.approx(3.0)

    def test_rejects_negative(self):
        with pytest.raises(ConfigurationError):
            RateEstimator().add(-1.0)
