import math

import numpy as np
import pytest
from scipy.special import softmax

from annealed_gmm import (
    Dataset,
    EmptyComponentError,
    EmptyDatasetError,
    GaussianComponent,
    InvalidOrderError,
    InvalidWeightError,
    MixtureParams,
    SingularCovarianceError,
    classical_energies,
    em_posterior,
    log_gaussian_pdf,
    log_likelihood,
    m_step,
)
from annealed_gmm.core import energy_matrix, weighted_update_arrays

from conftest import random_params
from oracles import loop_weighted_update, naive_log_likelihood

LOG_2PI = math.log(2.0 * math.pi)


def equal_pair(d=1, var=1.0):
    """Two identical components with weights (1/2, 1/2)."""
    mean = np.zeros(d)
    cov = var * np.eye(d)
    return MixtureParams.from_arrays(
        [0.5, 0.5], [mean, mean], np.stack([cov, cov])
    )


class TestLogGaussianPdf:
    def test_standard_normal_at_mean(self):
        assert log_gaussian_pdf(0.0, 0.0, 1.0) == pytest.approx(-0.5 * LOG_2PI, abs=1e-14)

    def test_2d_identity_at_mean(self):
        assert log_gaussian_pdf([1.5, -2.0], [1.5, -2.0], np.eye(2)) == pytest.approx(
            -LOG_2PI, abs=1e-14
        )

    def test_unit_offset(self):
        assert log_gaussian_pdf(1.0, 0.0, 1.0) == pytest.approx(
            -0.5 * LOG_2PI - 0.5, abs=1e-14
        )

    def test_non_spd_covariance_rejected(self):
        with pytest.raises(SingularCovarianceError):
            log_gaussian_pdf([0.0, 0.0], [0.0, 0.0], np.array([[1.0, 2.0], [2.0, 1.0]]))


class TestClassicalEnergies:
    def test_identical_components_equal_energy(self):
        h = classical_energies(0.7, equal_pair())
        assert h[0] - h[1] == 0.0

    def test_two_standard_normals_at_zero(self):
        h = classical_energies(0.0, equal_pair())
        expected = math.log(2.0) + 0.5 * LOG_2PI
        assert h == pytest.approx([expected, expected], abs=1e-14)

    def test_matches_direct_reevaluation(self, rng):
        for _ in range(20):
            k, d = int(rng.integers(2, 5)), int(rng.integers(1, 4))
            params = random_params(rng, k, d)
            y = rng.uniform(-3, 3, size=d)
            h = classical_energies(y, params)
            for j in range(k):
                direct = -math.log(params.weights[j]) - log_gaussian_pdf(
                    y, params.means[j], params.covariances[j]
                )
                assert h[j] == pytest.approx(direct, abs=1e-12)
            assert np.all(np.isfinite(h))

    def test_zero_weight_forbidden(self):
        with pytest.raises(InvalidWeightError):
            GaussianComponent(0.0, [0.0], [[1.0]])


class TestEmPosterior:
    def test_identical_components_split_evenly(self):
        assert em_posterior(1.3, equal_pair()) == pytest.approx([0.5, 0.5], abs=1e-14)

    def test_distant_component_gets_nothing(self):
        params = MixtureParams.from_arrays(
            [0.5, 0.5], [[0.0], [1e6]], np.array([[[1.0]], [[1.0]]])
        )
        post = em_posterior(0.0, params)
        assert post[0] >= 1.0 - 1e-6

    def test_is_softmax_of_negative_energies(self, rng):
        for _ in range(20):
            k, d = int(rng.integers(2, 6)), int(rng.integers(1, 4))
            params = random_params(rng, k, d)
            y = rng.uniform(-4, 4, size=d)
            expected = softmax(-classical_energies(y, params))
            assert em_posterior(y, params) == pytest.approx(expected, abs=1e-14)


class TestLogLikelihood:
    def test_single_point_at_mean(self):
        # K = 1 is disallowed, so use two identical components: the mixture
        # density collapses to one standard normal.
        data = Dataset(np.array([[0.0]]))
        assert log_likelihood(data, equal_pair()) == pytest.approx(
            -0.5 * LOG_2PI, abs=1e-12
        )

    def test_iid_sum_of_copies(self, rng):
        params = random_params(rng, 3, 2)
        point = rng.uniform(-2, 2, size=2)
        single = log_likelihood(Dataset(point[None, :]), params)
        repeated = log_likelihood(Dataset(np.tile(point, (7, 1))), params)
        assert repeated == pytest.approx(7 * single, rel=1e-12)

    def test_matches_naive_double_sum(self, rng):
        params = random_params(rng, 3, 2)
        points = rng.uniform(-3, 3, size=(20, 2))
        expected = naive_log_likelihood(
            points, params.weights, params.means, params.covariances
        )
        assert log_likelihood(Dataset(points), params) == pytest.approx(
            expected, abs=1e-10
        )

    def test_component_permutation_invariance(self, rng):
        params = random_params(rng, 4, 2)
        data = Dataset(rng.uniform(-3, 3, size=(15, 2)))
        base = log_likelihood(data, params)
        for perm in ([1, 0, 3, 2], [3, 2, 1, 0], [2, 0, 3, 1]):
            assert log_likelihood(data, params.permuted(perm)) == pytest.approx(
                base, abs=1e-12
            )

    def test_empty_dataset_rejected(self):
        with pytest.raises(EmptyDatasetError):
            Dataset(np.empty((0, 2)))


class TestMStep:
    def test_degenerate_weighting_on_first_component(self, rng):
        # all responsibility (up to a sliver) on component 1: recovers the
        # sample mean and biased sample covariance
        points = rng.standard_normal((12, 2))
        sliver = 1e-9
        resp = np.column_stack([np.full(12, 1.0 - sliver), np.full(12, sliver)])
        params = m_step(Dataset(points), resp, eps_cov=1e-6)
        mean = points.mean(axis=0)
        cov = (points - mean).T @ (points - mean) / 12 + 1e-6 * np.eye(2)
        assert params.weights == pytest.approx([1.0, 0.0], abs=1e-8)
        assert params.means[0] == pytest.approx(mean, abs=1e-7)
        assert params.covariances[0] == pytest.approx(cov, abs=1e-6)

    def test_exactly_empty_component_raises(self, rng):
        points = rng.standard_normal((10, 1))
        resp = np.column_stack([np.ones(10), np.zeros(10)])
        with pytest.raises(EmptyComponentError):
            m_step(Dataset(points), resp)

    def test_uniform_responsibilities_give_global_mean(self, rng):
        points = rng.standard_normal((9, 3))
        resp = np.full((9, 3), 1.0 / 3.0)
        params = m_step(Dataset(points), resp)
        for j in range(3):
            assert params.means[j] == pytest.approx(points.mean(axis=0), abs=1e-12)

    def test_matches_loop_oracle(self, rng):
        points = rng.standard_normal((10, 2))
        raw = rng.uniform(0.05, 1.0, size=(10, 2))
        resp = raw / raw.sum(axis=1, keepdims=True)
        params = m_step(Dataset(points), resp, eps_cov=1e-6)
        _, weights, means, covs = loop_weighted_update(points, resp, 1e-6)
        assert params.weights == pytest.approx(weights, abs=1e-12)
        assert params.means == pytest.approx(means, abs=1e-12)
        assert params.covariances == pytest.approx(covs, abs=1e-12)

    def test_weights_sum_exactly(self, rng):
        points = rng.standard_normal((30, 2))
        raw = rng.uniform(0.01, 1.0, size=(30, 4))
        resp = raw / raw.sum(axis=1, keepdims=True)
        params = m_step(Dataset(points), resp)
        assert abs(params.weights.sum() - 1.0) < 1e-12

    def test_covariance_uses_new_mean(self, rng):
        # the scatter is taken about the freshly computed mean, so the kernel
        # result matches the loop oracle even for very lopsided weights
        points = rng.standard_normal((8, 1)) * 3.0
        raw = rng.uniform(0.01, 1.0, size=(8, 2))
        resp = raw / raw.sum(axis=1, keepdims=True)
        counts, _, means, covs = weighted_update_arrays(points, resp, eps_cov=0.0)
        for j in range(2):
            scatter = sum(
                resp[i, j] * (points[i] - means[j]) ** 2 for i in range(8)
            ) / counts[j]
            assert covs[j][0, 0] == pytest.approx(scatter[0], abs=1e-12)

    def test_maximizes_complete_data_objective(self, rng):
        points = rng.standard_normal((25, 2))
        raw = rng.uniform(0.05, 1.0, size=(25, 3))
        resp = raw / raw.sum(axis=1, keepdims=True)
        data = Dataset(points)
        params = m_step(data, resp)

        def weighted_objective(p):
            energies = energy_matrix(data, p)
            return float(np.sum(resp * -energies))

        best = weighted_objective(params)
        for j in range(3):
            for coord in range(2):
                for delta in (-1e-3, 1e-3):
                    means = params.means.copy()
                    means[j, coord] += delta
                    perturbed = MixtureParams.from_arrays(
                        params.weights, means, params.covariances, eps_floor=0.0
                    )
                    assert weighted_objective(perturbed) <= best + 1e-12


class TestEmIterationMonotonicity:
    def test_one_full_iteration_never_decreases_likelihood(self, rng):
        for _ in range(15):
            k, d, n = int(rng.integers(2, 5)), int(rng.integers(1, 3)), 40
            params = random_params(rng, k, d)
            data = Dataset(rng.standard_normal((n, d)) * 2.0)
            before = log_likelihood(data, params)
            resp = np.stack([em_posterior(y, params) for y in data.points])
            after = log_likelihood(data, m_step(data, resp))
            assert after >= before - 1e-9


class TestValidation:
    def test_asymmetric_covariance_rejected(self):
        with pytest.raises(SingularCovarianceError):
            GaussianComponent(1.0, [0.0, 0.0], [[1.0, 1e-9], [0.0, 1.0]])

    def test_eigenvalue_floor_enforced(self):
        with pytest.raises(SingularCovarianceError):
            GaussianComponent(1.0, [0.0], [[1e-9]])

    def test_single_component_mixture_rejected(self):
        with pytest.raises(InvalidOrderError):
            MixtureParams([GaussianComponent(1.0, [0.0], [[1.0]])])

    def test_weights_must_sum_to_one(self):
        with pytest.raises(InvalidWeightError):
            MixtureParams.from_arrays(
                [0.5, 0.4], [[0.0], [1.0]], np.array([[[1.0]], [[1.0]]])
            )

    def test_labels_must_match_points(self):
        with pytest.raises(ValueError):
            Dataset(np.zeros((3, 1)), labels=np.array([0, 1]))

    def test_one_dimensional_points_promoted(self):
        data = Dataset(np.array([1.0, 2.0, 3.0]))
        assert data.points.shape == (3, 1)
