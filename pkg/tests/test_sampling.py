"""Tests for random matrix generation and its deterministic helpers."""

import numpy as np
import pytest
import scipy.stats

from wishart_risk.errors import DomainError, ParameterError
from wishart_risk.mc import sample_inverse_compound
from wishart_risk.sampling import (
    SPD_SCHEMES,
    CovarianceModel,
    draw_gaussian,
    pseudo_inverse,
    random_spd,
    rng_stream,
    sample_compound_wishart,
    sample_haar_orthogonal,
    symmetric_root,
)
from wishart_risk.estimators import build_weight_matrix


class TestRandomSpd:
    def test_n1_positive_scalar(self):
        model = random_spd(1, 0)
        assert model.sigma.shape == (1, 1)
        assert model.sigma[0, 0] > 0

    @pytest.mark.parametrize("scheme", SPD_SCHEMES)
    def test_reproducible_and_positive(self, scheme):
        a = random_spd(5, 123, scheme)
        b = random_spd(5, 123, scheme)
        np.testing.assert_array_equal(a.sigma, b.sigma)
        assert np.linalg.eigvalsh(a.sigma)[0] > 0

    def test_condition_number_stays_moderate(self):
        worst = 0.0
        for n, seeds in ((5, 100), (50, 100), (400, 10)):
            for seed in range(seeds):
                eigs = np.linalg.eigvalsh(random_spd(n, seed).sigma)
                worst = max(worst, eigs[-1] / eigs[0])
        assert worst <= 1e6

    def test_unknown_scheme(self):
        with pytest.raises(ParameterError):
            random_spd(3, 0, "bogus")

    def test_model_caches_consistent(self):
        model = random_spd(6, 7)
        np.testing.assert_allclose(model.sigma_root @ model.sigma_root,
                                   model.sigma, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(model.sigma @ model.sigma_inv, np.eye(6),
                                   atol=1e-10)

    def test_non_spd_rejected(self):
        with pytest.raises(DomainError):
            CovarianceModel.from_sigma(np.array([[1.0, 2.0], [2.0, 1.0]]))
        with pytest.raises(DomainError):
            CovarianceModel.from_sigma(np.array([[1.0, 0.5], [0.4, 1.0]]))


class TestSymmetricRoot:
    def test_identity(self):
        np.testing.assert_array_almost_equal(symmetric_root(np.eye(4)), np.eye(4))

    def test_diagonal(self):
        np.testing.assert_allclose(symmetric_root(np.diag([4.0, 9.0])),
                                   np.diag([2.0, 3.0]), rtol=1e-12)

    def test_root_squares_back(self):
        sigma = random_spd(8, 3).sigma
        root = symmetric_root(sigma)
        np.testing.assert_allclose(root, root.T, atol=1e-12)
        err = np.linalg.norm(root @ root - sigma) / np.linalg.norm(sigma)
        assert err < 1e-10

    def test_rejects_indefinite(self):
        with pytest.raises(DomainError):
            symmetric_root(np.diag([1.0, -0.5]))


class TestGaussian:
    def test_moments(self):
        x = draw_gaussian(400, 250, 0).x
        assert abs(x.mean()) < 3.0 / np.sqrt(x.size)
        assert abs(x.var() - 1.0) < 5.0 / np.sqrt(x.size)

    def test_stream_addressing_is_stable(self):
        a = rng_stream(9, 1, 4).standard_normal(5)
        b = rng_stream(9, 1, 4).standard_normal(5)
        c = rng_stream(9, 1, 5).standard_normal(5)
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)


class TestCompoundWishart:
    def test_symmetry_exact(self):
        model = random_spd(4, 0)
        weight = build_weight_matrix("ewma", 12, lam=0.9)
        w = sample_compound_wishart(model, weight, 5)
        np.testing.assert_array_equal(w, w.T)

    def test_white_mean_is_t_times_identity(self):
        # E[X^T X] = T I; Monte Carlo within 3 standard errors
        t, n, trials = 12, 4, 20_000
        rng = np.random.default_rng(77)
        x = rng.standard_normal((trials, t, n))
        samples = np.einsum("sti,stj->sij", x, x)
        mean = samples.mean(axis=0)
        se = samples.std(axis=0, ddof=1) / np.sqrt(trials)
        assert np.all(np.abs(mean - t * np.eye(n)) <= 3 * se)

    def test_general_mean_is_trace_times_sigma(self):
        # E[W] = Tr(B) Sigma for the full construction
        model = random_spd(3, 5)
        weight = build_weight_matrix("ewma", 10, lam=0.85)
        trials = 20_000
        acc = np.zeros((3, 3))
        acc_sq = np.zeros((3, 3))
        for i in range(trials):
            w = sample_compound_wishart(model, weight, rng_stream(400, i))
            acc += w
            acc_sq += w * w
        mean = acc / trials
        var = acc_sq / trials - mean**2
        se = np.sqrt(var / trials)
        assert np.all(np.abs(mean - weight.tr_b * model.sigma) <= 3 * se)

    def test_rank_deficient_warns(self):
        model = random_spd(5, 1)
        weight = build_weight_matrix("idempotent", 10, rank=3)
        with pytest.warns(UserWarning, match="rank"):
            sample_compound_wishart(model, weight, 0)

    def test_white_inverse_mean(self):
        # E[(X^T X)^{-1}] = I / (T - n - 1)
        n, t, trials = 5, 30, 20_000
        model = CovarianceModel.from_sigma(np.eye(n))
        weight = build_weight_matrix("mle", t)
        inv, ok = sample_inverse_compound(model, weight, trials, 505)
        good = inv[ok]
        mean = good.mean(axis=0)
        se = good.std(axis=0, ddof=1) / np.sqrt(good.shape[0])
        target = np.eye(n) / (t - n - 1)
        assert np.all(np.abs(mean - target) <= 3 * se)


class TestHaarOrthogonal:
    def test_orthogonality(self):
        o = sample_haar_orthogonal(6, 3)
        np.testing.assert_allclose(o.T @ o, np.eye(6), atol=1e-12)

    def test_n1_sign_frequencies(self):
        signs = [sample_haar_orthogonal(1, seed)[0, 0] for seed in range(4000)]
        assert set(np.unique(signs)) == {-1.0, 1.0}
        assert abs(np.mean(signs)) < 3.0 / np.sqrt(len(signs))

    def test_entry_second_moment(self):
        # E[o_11^2] = 1/n
        n, samples = 4, 200_000
        from wishart_risk.mc import haar_sample_batch

        o = haar_sample_batch(n, samples, 808)
        vals = o[:, 0, 0] ** 2
        se = vals.std(ddof=1) / np.sqrt(samples)
        assert abs(vals.mean() - 1.0 / n) <= 3 * se


class TestPseudoInverse:
    def test_identity(self):
        np.testing.assert_array_equal(pseudo_inverse(np.eye(3)), np.eye(3))

    def test_rank_one_diagonal(self):
        np.testing.assert_allclose(pseudo_inverse(np.diag([2.0, 0.0])),
                                   np.diag([0.5, 0.0]), atol=1e-14)

    def test_projector_is_fixed_point(self):
        t = 9
        p = np.eye(t) - np.full((t, t), 1.0 / t)
        np.testing.assert_allclose(pseudo_inverse(p), p, atol=1e-12)

    def test_matches_inverse_on_invertible(self):
        a = random_spd(5, 9).sigma
        np.testing.assert_allclose(pseudo_inverse(a), np.linalg.inv(a),
                                   rtol=1e-9, atol=1e-12)


class TestOrthogonalInvariance:
    def test_spectrum_invariant_under_conjugation(self):
        # eigenvalue clouds of X^T B X and O (X^T B X) O^T coincide in law
        n, t, trials = 10, 25, 10_000
        weight = build_weight_matrix("ewma", t, lam=0.93)
        o = sample_haar_orthogonal(n, 99)
        rng = np.random.default_rng(1234)
        x1 = rng.standard_normal((trials, t, n))
        x2 = rng.standard_normal((trials, t, n))
        diag = np.diag(weight.matrix)
        a1 = np.einsum("sti,stj->sij", x1 * diag[None, :, None], x1)
        a2 = np.einsum("sti,stj->sij", x2 * diag[None, :, None], x2)
        eig_plain = np.linalg.eigvalsh(a1).ravel()
        eig_conj = np.linalg.eigvalsh(o @ a2 @ o.T).ravel()
        stat = scipy.stats.ks_2samp(eig_plain, eig_conj).statistic
        assert stat < 0.02
