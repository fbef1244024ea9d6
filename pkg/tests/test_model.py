"""Tests for datasets, priors, draw stores, and the observed-data likelihood."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bqr.distributions import al_cdf
from bqr.exceptions import DomainError, EmptyDraws, NonFinite, NotPositiveDefinite
from bqr.model import (
    DEFAULT_KAPPA,
    ChainState,
    Dataset,
    DrawStore,
    MisclassPrior,
    NaivePrior,
    latent_y_prob,
    observed_loglik,
    success_prob,
)


def toy_dataset(y=(1, 0, 1)):
    X = np.array([[1.0, 0.2], [1.0, -1.1], [1.0, 0.7]])
    return Dataset(X=X, y_obs=np.array(y, dtype=float), column_names=("intercept", "x1"))


class TestDataset:
    def test_valid_construction(self):
        data = toy_dataset()
        assert data.n == 3
        assert data.k == 2
        assert data.column_names == ("intercept", "x1")
        assert data.y_obs.dtype == np.int64

    def test_design_must_be_2d(self):
        with pytest.raises(DomainError):
            Dataset(X=np.ones(3), y_obs=np.zeros(3), column_names=("intercept",))

    def test_design_must_be_finite(self):
        X = np.array([[1.0, np.inf], [1.0, 0.0]])
        with pytest.raises(DomainError):
            Dataset(X=X, y_obs=np.zeros(2), column_names=("intercept", "x1"))

    def test_outcome_length_mismatch(self):
        X = np.ones((3, 1))
        with pytest.raises(DomainError):
            Dataset(X=X, y_obs=np.zeros(2), column_names=("intercept",))

    def test_outcome_must_be_binary(self):
        X = np.ones((3, 1))
        with pytest.raises(DomainError):
            Dataset(X=X, y_obs=np.array([0.0, 1.0, 2.0]), column_names=("intercept",))

    def test_names_count_must_match_columns(self):
        X = np.ones((2, 2))
        with pytest.raises(DomainError):
            Dataset(X=X, y_obs=np.zeros(2), column_names=("intercept",))

    def test_names_must_be_unique(self):
        X = np.column_stack([np.ones(2), np.zeros(2)])
        with pytest.raises(DomainError):
            Dataset(X=X, y_obs=np.zeros(2), column_names=("a", "a"))

    def test_first_column_must_be_intercept(self):
        X = np.array([[2.0, 0.0], [1.0, 1.0]])
        with pytest.raises(DomainError):
            Dataset(X=X, y_obs=np.zeros(2), column_names=("intercept", "x1"))

    def test_y_true_validated_when_given(self):
        X = np.ones((2, 1))
        with pytest.raises(DomainError):
            Dataset(
                X=X,
                y_obs=np.zeros(2),
                column_names=("intercept",),
                y_true=np.array([0.0, 3.0]),
            )
        data = Dataset(
            X=X,
            y_obs=np.zeros(2),
            column_names=("intercept",),
            y_true=np.array([1.0, 0.0]),
        )
        assert data.y_true is not None


class TestPriors:
    def test_isotropic_layout(self):
        prior = NaivePrior.isotropic(3, scale=10.0)
        assert prior.beta0.shape == (3,)
        np.testing.assert_array_equal(prior.beta0, np.zeros(3))
        np.testing.assert_array_equal(prior.B0, 10.0 * np.eye(3))

    def test_precision_and_precision_mean(self):
        prior = NaivePrior(beta0=np.array([1.0, -2.0]), B0=np.diag([4.0, 0.25]))
        np.testing.assert_allclose(prior.precision, np.diag([0.25, 4.0]), atol=1e-12)
        np.testing.assert_allclose(prior.precision_mean, [0.25, -8.0], atol=1e-12)

    def test_prior_mean_must_be_vector(self):
        with pytest.raises(DomainError):
            NaivePrior(beta0=np.ones((2, 1)), B0=np.eye(2))

    def test_prior_mean_must_be_finite(self):
        with pytest.raises(DomainError):
            NaivePrior(beta0=np.array([np.nan]), B0=np.eye(1))

    def test_covariance_shape_mismatch(self):
        with pytest.raises(DomainError):
            NaivePrior(beta0=np.zeros(2), B0=np.eye(3))

    def test_covariance_must_be_spd(self):
        with pytest.raises(NotPositiveDefinite):
            NaivePrior(beta0=np.zeros(2), B0=np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_isotropic_rejects_bad_dimension_and_scale(self):
        with pytest.raises(DomainError):
            NaivePrior.isotropic(0, scale=1.0)
        with pytest.raises(DomainError):
            NaivePrior.isotropic(2, scale=0.0)

    def test_misclass_defaults(self):
        prior = MisclassPrior.isotropic(2, scale=10.0)
        assert prior.kappa == DEFAULT_KAPPA
        assert prior.identifiability_rejection is False

    def test_misclass_kappa_validation(self):
        with pytest.raises(DomainError):
            MisclassPrior(beta0=np.zeros(1), B0=np.eye(1), kappa=(1.0, 2.0, 3.0))
        with pytest.raises(DomainError):
            MisclassPrior(beta0=np.zeros(1), B0=np.eye(1), kappa=(1.0, 2.0, 3.0, 0.0))

    def test_chain_state_holds_fields(self):
        state = ChainState(beta=np.zeros(2), w=np.ones(3), z=np.zeros(3))
        assert state.y is None and state.delta01 is None and state.delta10 is None


class TestDrawStore:
    def make(self, n_chains=2, total=10, burn_in=4, thin=2, names=("a", "b")):
        rows = len(range(burn_in, total, thin))
        rng = np.random.default_rng(0)
        chains = [rng.normal(size=(rows, len(names))) for _ in range(n_chains)]
        return DrawStore(names, chains, total, burn_in, thin), chains

    def test_shape_accounting(self):
        store, _ = self.make()
        assert store.n_chains == 2
        assert store.n_retained == 3
        assert store.names == ("a", "b")

    def test_per_chain_and_pooled(self):
        store, chains = self.make()
        per = store.per_chain("b")
        np.testing.assert_array_equal(per[0], chains[0][:, 1])
        np.testing.assert_array_equal(per[1], chains[1][:, 1])
        np.testing.assert_array_equal(store.pooled("a"), np.concatenate([c[:, 0] for c in chains]))

    def test_unknown_parameter(self):
        store, _ = self.make()
        with pytest.raises(DomainError):
            store.per_chain("nope")

    def test_duplicate_names_rejected(self):
        with pytest.raises(DomainError):
            DrawStore(("a", "a"), [np.zeros((3, 2))], 3, 0)

    def test_no_chains_rejected(self):
        with pytest.raises(EmptyDraws):
            DrawStore(("a",), [], 3, 0)

    def test_bad_schedule_rejected(self):
        with pytest.raises(DomainError):
            DrawStore(("a",), [np.zeros((1, 1))], 3, 3)
        with pytest.raises(DomainError):
            DrawStore(("a",), [np.zeros((3, 1))], 3, 0, thin=0)

    def test_wrong_chain_shape_rejected(self):
        with pytest.raises(DomainError):
            DrawStore(("a", "b"), [np.zeros((2, 2))], 3, 0)

    def test_non_finite_draws_rejected(self):
        bad = np.zeros((3, 1))
        bad[1, 0] = np.nan
        with pytest.raises(DomainError):
            DrawStore(("a",), [bad], 3, 0)

    def test_merge_combines_chains(self):
        s1, c1 = self.make(n_chains=1)
        s2, c2 = self.make(n_chains=2)
        merged = DrawStore.merge([s1, s2])
        assert merged.n_chains == 3
        np.testing.assert_array_equal(merged.chains[0], c1[0])
        np.testing.assert_array_equal(merged.chains[2], c2[1])

    def test_merge_rejects_layout_mismatch(self):
        s1, _ = self.make(names=("a", "b"))
        s2, _ = self.make(names=("a", "c"))
        with pytest.raises(DomainError):
            DrawStore.merge([s1, s2])
        s3, _ = self.make(burn_in=2)
        with pytest.raises(DomainError):
            DrawStore.merge([s1, s3])

    def test_merge_rejects_empty(self):
        with pytest.raises(EmptyDraws):
            DrawStore.merge([])


class TestSuccessProb:
    def test_zero_predictor_gives_one_minus_p(self):
        X = np.array([[1.0, 0.0]])
        psi = success_prob(X, np.zeros(2), 0.3)
        np.testing.assert_allclose(psi, [0.7], atol=1e-15)

    def test_unit_predictor_median_model(self):
        # psi = 1 - 0.5 exp(-0.5) for x' beta = 1 at p = 0.5
        X = np.array([[1.0]])
        psi = success_prob(X, np.array([1.0]), 0.5)
        np.testing.assert_allclose(psi, [0.6967346701436833], atol=1e-12)

    def test_large_predictor_saturates(self):
        X = np.array([[1.0]])
        psi = success_prob(X, np.array([50.0]), 0.5)
        assert psi[0] > 1.0 - 1e-9
        assert psi[0] <= 1.0

    @given(
        eta=st.floats(-30, 30),
        p=st.floats(0.01, 0.99),
    )
    @settings(max_examples=200, deadline=None)
    def test_complement_identity(self, eta, p):
        X = np.array([[1.0]])
        psi = success_prob(X, np.array([eta]), p)
        assert psi[0] + al_cdf(-eta, p) == pytest.approx(1.0, abs=1e-15)
        assert 0.0 <= psi[0] <= 1.0


class TestObservedLoglik:
    def test_hand_value_single_row(self):
        # psi = 0.5; P(y_obs = 1) = 0.6 * 0.5 + 0.2 * 0.5 = 0.4
        data = Dataset(X=np.ones((1, 1)), y_obs=np.array([1.0]), column_names=("intercept",))
        ll = observed_loglik(data, np.zeros(1), delta01=0.4, delta10=0.2, p=0.5)
        np.testing.assert_allclose(ll, np.log(0.4), atol=1e-12)

    def test_reduces_to_clean_likelihood_at_zero_deltas(self):
        data = Dataset(X=np.ones((1, 1)), y_obs=np.array([1.0]), column_names=("intercept",))
        ll = observed_loglik(data, np.zeros(1), delta01=0.0, delta10=0.0, p=0.3)
        np.testing.assert_allclose(ll, np.log(0.7), atol=1e-12)

    def test_matches_total_probability_sum(self):
        # Marginalizing the latent truth by brute force must agree exactly.
        rng = np.random.default_rng(7)
        X = np.column_stack([np.ones(40), rng.normal(size=40), rng.normal(size=40)])
        y_obs = rng.integers(0, 2, size=40).astype(float)
        data = Dataset(X=X, y_obs=y_obs, column_names=("intercept", "x1", "x2"))
        beta = np.array([0.3, -1.1, 0.6])
        d01, d10, p = 0.25, 0.07, 0.4
        psi = success_prob(X, beta, p)
        obs1 = (1.0 - d01) * psi + d10 * (1.0 - psi)
        direct = float(np.sum(np.log(np.where(y_obs == 1, obs1, 1.0 - obs1))))
        ll = observed_loglik(data, beta, d01, d10, p)
        np.testing.assert_allclose(ll, direct, rtol=1e-12)

    def test_delta_domain_checks(self):
        data = toy_dataset()
        beta = np.zeros(2)
        with pytest.raises(DomainError):
            observed_loglik(data, beta, delta01=-0.1, delta10=0.0, p=0.5)
        with pytest.raises(DomainError):
            observed_loglik(data, beta, delta01=0.0, delta10=1.5, p=0.5)

    def test_impossible_record_raises(self):
        # delta01 = 1 with delta10 = 0 assigns probability 0 to a recorded 1.
        data = Dataset(X=np.ones((1, 1)), y_obs=np.array([1.0]), column_names=("intercept",))
        with pytest.raises(NonFinite):
            observed_loglik(data, np.zeros(1), delta01=1.0, delta10=0.0, p=0.5)

    def test_extreme_predictor_stays_finite(self):
        # Log-space evaluation keeps tail observations informative, not -inf.
        X = np.array([[1.0, 30.0], [1.0, -30.0]])
        data = Dataset(X=X, y_obs=np.array([0.0, 1.0]), column_names=("intercept", "x1"))
        ll = observed_loglik(data, np.array([0.0, 1.0]), 0.0, 0.0, 0.5)
        assert np.isfinite(ll)
        assert ll < -25.0


class TestLatentYProb:
    def test_zero_deltas_return_record(self):
        psi = np.array([0.2, 0.9])
        y_obs = np.array([1.0, 0.0])
        out = latent_y_prob(psi, 0.0, 0.0, y_obs)
        np.testing.assert_array_equal(out, y_obs)

    def test_hand_values(self):
        psi = np.array([0.5])
        np.testing.assert_allclose(
            latent_y_prob(psi, 0.4, 0.2, np.array([1.0])), [0.75], atol=1e-12
        )
        np.testing.assert_allclose(
            latent_y_prob(psi, 0.4, 0.2, np.array([0.0])), [1.0 / 3.0], atol=1e-12
        )

    def test_symmetric_half_deltas_give_psi(self):
        psi = np.linspace(0.05, 0.95, 7)
        for y in (0.0, 1.0):
            out = latent_y_prob(psi, 0.5, 0.5, np.full(7, y))
            np.testing.assert_allclose(out, psi, atol=1e-12)

    @given(
        d01=st.floats(0.01, 0.45),
        d10=st.floats(0.01, 0.45),
        y=st.sampled_from([0.0, 1.0]),
    )
    @settings(max_examples=100, deadline=None)
    def test_monotone_in_psi(self, d01, d10, y):
        psi = np.linspace(0.0, 1.0, 41)
        out = latent_y_prob(psi, d01, d10, np.full(41, y))
        assert np.all(np.diff(out) >= -1e-12)
        assert np.all((out >= 0.0) & (out <= 1.0))

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            latent_y_prob(np.array([1.2]), 0.1, 0.1, np.array([1.0]))
        with pytest.raises(DomainError):
            latent_y_prob(np.array([0.5]), -0.1, 0.1, np.array([1.0]))

    def test_zero_denominator_raises(self):
        # Recorded 1 is impossible when delta01 = 1 and delta10 = 0.
        with pytest.raises(DomainError):
            latent_y_prob(np.array([0.5]), 1.0, 0.0, np.array([1.0]))
