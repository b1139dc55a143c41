"""Gaussian mixture model core: densities, classical energies, posteriors,
log-likelihood, and the shared weighted M-step.

Everything works in log space; raw component densities are never formed.
All functions are pure and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import InitVar, dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import logsumexp, softmax

from .errors import (
    EmptyComponentError,
    EmptyDatasetError,
    InvalidOrderError,
    InvalidWeightError,
    SingularCovarianceError,
)

DEFAULT_EPS_COV = 1e-6

_LOG_2PI = np.log(2.0 * np.pi)
_SYMMETRY_TOL = 1e-12
_WEIGHT_SUM_TOL = 1e-10
_RESP_ROW_TOL = 1e-10
# N_k below N * this fraction counts as an empty component.
EMPTY_COMPONENT_FRACTION = 1e-12


@dataclass
class GaussianComponent:
    """One mixture component: weight pi in (0, 1], mean, SPD covariance.

    The covariance must be symmetric to 1e-12 and have all eigenvalues at or
    above ``eps_floor`` (the regularization floor used by the M-step).
    """

    weight: float
    mean: np.ndarray
    covariance: np.ndarray
    eps_floor: InitVar[float] = DEFAULT_EPS_COV

    def __post_init__(self, eps_floor: float):
        self.weight = float(self.weight)
        self.mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        self.covariance = np.atleast_2d(np.asarray(self.covariance, dtype=float))
        if not (0.0 < self.weight <= 1.0 + _WEIGHT_SUM_TOL):
            raise InvalidWeightError(f"component weight {self.weight} not in (0, 1]")
        d = self.mean.shape[0]
        if self.mean.ndim != 1 or self.covariance.shape != (d, d):
            raise ValueError(
                f"mean of length {d} needs a {d}x{d} covariance, "
                f"got shape {self.covariance.shape}"
            )
        asym = np.max(np.abs(self.covariance - self.covariance.T))
        if asym > _SYMMETRY_TOL:
            raise SingularCovarianceError(
                f"covariance asymmetric by {asym:.3e} (tolerance {_SYMMETRY_TOL})"
            )
        eigvals = np.linalg.eigvalsh(self.covariance)
        eigmin = float(eigvals[0])
        slack = 1e-12 * max(1.0, float(np.abs(eigvals).max()))
        if eigmin < eps_floor - slack:
            raise SingularCovarianceError(
                f"covariance eigenvalue {eigmin:.3e} below floor {eps_floor:.3e}"
            )

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


@dataclass
class MixtureParams:
    """Full parameter set of a K-component Gaussian mixture (K >= 2).

    Component weights must sum to one within 1e-10.  Treat instances as
    immutable; the packed array views are cached on first access.
    """

    components: list[GaussianComponent]

    def __post_init__(self):
        k = len(self.components)
        if k < 2:
            raise InvalidOrderError(f"mixture needs at least 2 components, got {k}")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise ValueError(f"components disagree on dimension: {sorted(dims)}")
        total = sum(c.weight for c in self.components)
        if abs(total - 1.0) > _WEIGHT_SUM_TOL:
            raise InvalidWeightError(f"weights sum to {total!r}, expected 1")

    @classmethod
    def from_arrays(cls, weights, means, covariances,
                    eps_floor: float = DEFAULT_EPS_COV) -> "MixtureParams":
        weights = np.asarray(weights, dtype=float)
        means = np.atleast_2d(np.asarray(means, dtype=float))
        covariances = np.asarray(covariances, dtype=float)
        if covariances.ndim == 2:
            covariances = covariances[:, None, None]
        return cls([
            GaussianComponent(w, m, c, eps_floor=eps_floor)
            for w, m, c in zip(weights, means, covariances, strict=True)
        ])

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def dim(self) -> int:
        return self.components[0].dim

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([c.weight for c in self.components])

    @cached_property
    def means(self) -> np.ndarray:
        return np.stack([c.mean for c in self.components])

    @cached_property
    def covariances(self) -> np.ndarray:
        return np.stack([c.covariance for c in self.components])

    def permuted(self, order) -> "MixtureParams":
        """Mixture with components reordered by the index sequence ``order``."""
        return MixtureParams([self.components[i] for i in order])


@dataclass
class Dataset:
    """Observed points (N x d) with optional generative ground truth and labels."""

    points: np.ndarray
    ground_truth: MixtureParams | None = None
    labels: np.ndarray | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError(f"points must be N x d, got shape {pts.shape}")
        if pts.shape[0] < 1:
            raise EmptyDatasetError("dataset has no points")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points contain non-finite values")
        self.points = pts
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (pts.shape[0],):
                raise ValueError("labels must be one integer per point")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def log_gaussian_pdf(y, mean, covariance) -> float:
    """ln N(y; mean, covariance), evaluated fully in log space.

    Raises:
        SingularCovarianceError: covariance is not positive definite.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    covariance = np.atleast_2d(np.asarray(covariance, dtype=float))
    chol = _cholesky_spd(covariance)
    d = y.shape[0]
    z = np.linalg.solve(chol, y - mean)
    log_det = 2.0 * np.sum(np.log(np.diag(chol)))
    return float(-0.5 * (d * _LOG_2PI + log_det + z @ z))


def _cholesky_spd(covariance: np.ndarray) -> np.ndarray:
    try:
        return np.linalg.cholesky(covariance)
    except np.linalg.LinAlgError as exc:
        raise SingularCovarianceError(
            f"covariance is not positive definite: {exc}"
        ) from exc


def log_density_matrix(points: np.ndarray, params: MixtureParams) -> np.ndarray:
    """N x K matrix of ln g(y_i; mu_k, Sigma_k)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    n, d = points.shape
    k = params.n_components
    out = np.empty((n, k))
    for j in range(k):
        chol = _cholesky_spd(params.covariances[j])
        z = solve_triangular(chol, (points - params.means[j]).T, lower=True)
        log_det = 2.0 * np.sum(np.log(np.diag(chol)))
        out[:, j] = -0.5 * (d * _LOG_2PI + log_det + np.sum(z * z, axis=0))
    return out


def energy_matrix(data: Dataset, params: MixtureParams) -> np.ndarray:
    """N x K matrix of classical energies h_i^k = -ln(pi_k g(y_i; mu_k, Sigma_k))."""
    weights = params.weights
    if np.any(weights <= 0.0):
        raise InvalidWeightError("all mixture weights must be positive")
    return -(np.log(weights)[None, :] + log_density_matrix(data.points, params))


def classical_energies(y, params: MixtureParams) -> np.ndarray:
    """Energy vector (h^1, ..., h^K) of a single point; all entries finite."""
    data = Dataset(np.atleast_2d(np.asarray(y, dtype=float)))
    return energy_matrix(data, params)[0]


def em_posterior(y, params: MixtureParams) -> np.ndarray:
    """Classical E-step posterior q(sigma = k), the softmax of -h^k."""
    return softmax(-classical_energies(y, params))


def log_likelihood(data: Dataset, params: MixtureParams) -> float:
    """Sum over points of ln sum_k pi_k g(y_i; mu_k, Sigma_k), via log-sum-exp."""
    if data.n < 1:
        raise EmptyDatasetError("cannot evaluate likelihood of an empty dataset")
    return float(np.sum(logsumexp(-energy_matrix(data, params), axis=1)))


def check_responsibilities(resp: np.ndarray, n_points: int | None = None,
                           n_components: int | None = None) -> np.ndarray:
    """Validate an N x K responsibility matrix (rows sum to 1, entries in [0, 1])."""
    resp = np.asarray(resp, dtype=float)
    if resp.ndim != 2:
        raise ValueError(f"responsibilities must be N x K, got shape {resp.shape}")
    if n_points is not None and resp.shape[0] != n_points:
        raise ValueError(f"expected {n_points} rows, got {resp.shape[0]}")
    if n_components is not None and resp.shape[1] != n_components:
        raise ValueError(f"expected {n_components} columns, got {resp.shape[1]}")
    if np.any(resp < -_RESP_ROW_TOL) or np.any(resp > 1.0 + _RESP_ROW_TOL):
        raise ValueError("responsibilities outside [0, 1]")
    row_err = np.max(np.abs(resp.sum(axis=1) - 1.0))
    if row_err > _RESP_ROW_TOL:
        raise ValueError(f"responsibility rows sum to 1 +/- {row_err:.3e}")
    return resp


def weighted_update_arrays(points: np.ndarray, resp: np.ndarray,
                           eps_cov: float = DEFAULT_EPS_COV):
    """Raw M-step algebra: weighted counts, means, and regularized covariances.

    Returns ``(counts, weights, means, covariances)`` without validating that
    any component kept data; callers decide how to treat empty components.
    Covariances are the weighted scatter about the new means, symmetrized, with
    ``eps_cov * I`` added.
    """
    n, d = points.shape
    counts = resp.sum(axis=0)
    weights = counts / n
    with np.errstate(invalid="ignore", divide="ignore"):
        means = (resp.T @ points) / counts[:, None]
    k = resp.shape[1]
    covariances = np.empty((k, d, d))
    eye = eps_cov * np.eye(d)
    with np.errstate(invalid="ignore", divide="ignore"):
        for j in range(k):
            diff = points - means[j]
            cov = (resp[:, j] * diff.T) @ diff / counts[j]
            covariances[j] = 0.5 * (cov + cov.T) + eye
    return counts, weights, means, covariances


def m_step(data: Dataset, resp: np.ndarray,
           eps_cov: float = DEFAULT_EPS_COV) -> MixtureParams:
    """Maximize the weighted complete-data log-likelihood for fixed responsibilities.

    pi_k = N_k / N, mu_k = weighted mean, Sigma_k = weighted scatter about the
    new mu_k (biased 1/N_k normalization), symmetrized and floored by
    ``eps_cov * I``.

    Raises:
        EmptyComponentError: some N_k < N * 1e-12; the caller chooses between
            aborting the trial and reseeding the component.
    """
    resp = check_responsibilities(resp, n_points=data.n)
    counts, weights, means, covariances = weighted_update_arrays(
        data.points, resp, eps_cov=eps_cov
    )
    threshold = data.n * EMPTY_COMPONENT_FRACTION
    for j, nk in enumerate(counts):
        if nk < threshold:
            raise EmptyComponentError(j, float(nk))
    return MixtureParams.from_arrays(weights, means, covariances, eps_floor=eps_cov)
