"""Unified annealed EM loop covering plain EM, simulated-annealing EM (tempered
posteriors, beta annealed to 1), and quantum-annealing EM (ring-mixed exponential
weights, gamma annealed to 0), plus schedules, convergence control, and
trajectory capture.

A single fit is sequential; independent fits can run concurrently with
independent RNG streams (randomness is used only by the component-reseeding
policy).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    DEFAULT_EPS_COV,
    EMPTY_COMPONENT_FRACTION,
    Dataset,
    GaussianComponent,
    MixtureParams,
    energy_matrix,
    m_step,
    weighted_update_arrays,
)
from .errors import EmptyComponentError, NumericalRangeError
from .quantum import negative_free_energy, responsibility_rows

MODES = ("em", "dsaem", "dqaem")

# Schedule counts as settled once (beta, gamma) is this close to (1, 0).
_SCHEDULE_ATOL = 1e-10
# Below this, beta*gamma perturbs responsibilities under double rounding;
# the E-step then takes the exact gamma = 0 path.
_GAMMA_CUTOFF = 1e-14


@dataclass
class AnnealingSchedule:
    """Exponential decay laws beta_t = (beta0 - 1) exp(-t/tau) + 1 and
    gamma_t = gamma0 exp(-t/tau).

    ``beta_fixed`` pins beta_t to 1 regardless of beta0.  ``tau = inf`` makes
    the schedule constant.
    """

    beta0: float = 1.0
    gamma0: float = 0.0
    tau: float = 0.95
    beta_fixed: bool = False

    def __post_init__(self):
        if not (0.0 < self.beta0 <= 1.0):
            raise ValueError(f"beta0 must be in (0, 1], got {self.beta0}")
        if self.gamma0 < 0.0:
            raise ValueError(f"gamma0 must be nonnegative, got {self.gamma0}")
        if not (self.tau > 0.0):
            raise ValueError(f"tau must be positive, got {self.tau}")

    def at(self, t: int) -> tuple[float, float]:
        if t < 0:
            raise ValueError(f"iteration index must be nonnegative, got {t}")
        decay = math.exp(-t / self.tau)
        beta = 1.0 if self.beta_fixed else (self.beta0 - 1.0) * decay + 1.0
        return beta, self.gamma0 * decay


def schedule_at(schedule: AnnealingSchedule, t: int) -> tuple[float, float]:
    """(beta_t, gamma_t) for iteration t."""
    return schedule.at(t)


@dataclass
class EstimatorConfig:
    """Which estimator to run and how.

    ``mode`` is one of ``em`` (beta = 1, gamma = 0 throughout), ``dsaem``
    (gamma forced to 0, beta annealed per schedule), or ``dqaem`` (full
    schedule).  ``seed`` feeds the RNG used by the ``reseed``
    empty-component policy; fits are otherwise deterministic.
    """

    mode: str
    schedule: AnnealingSchedule = field(default_factory=AnnealingSchedule)
    max_iterations: int = 1000
    tolerance: float = 1e-8
    empty_component_policy: str = "abort"
    eps_cov: float = DEFAULT_EPS_COV
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be nonnegative")
        if not (self.tolerance > 0.0):
            raise ValueError("tolerance must be positive")
        if self.empty_component_policy not in ("abort", "reseed"):
            raise ValueError(
                f"unknown empty-component policy {self.empty_component_policy!r}"
            )

    @property
    def effective_schedule(self) -> AnnealingSchedule:
        """Schedule after applying the mode's constraints."""
        if self.mode == "em":
            return AnnealingSchedule(beta0=1.0, gamma0=0.0,
                                     tau=self.schedule.tau, beta_fixed=True)
        if self.mode == "dsaem":
            return replace(self.schedule, gamma0=0.0)
        return self.schedule


@dataclass
class FitResult:
    """Outcome of one fit: final parameters, objective and parameter history.

    ``objective_history[t]`` is the annealed objective of ``param_trajectory[t]``
    at the schedule values of iteration t (the log-likelihood for EM); both
    sequences have ``iterations + 1`` entries.  ``failure_reason`` is None,
    ``"empty_component"``, or ``"numerical_range"``.
    """

    final_params: MixtureParams
    objective_history: np.ndarray
    param_trajectory: list[MixtureParams]
    iterations: int
    converged: bool
    failure_reason: str | None = None


def _schedule_settled(beta: float, gamma: float) -> bool:
    return gamma < _SCHEDULE_ATOL and abs(1.0 - beta) < _SCHEDULE_ATOL


def run_fit(data: Dataset, init: MixtureParams, config: EstimatorConfig) -> FitResult:
    """Iterate E and M steps under the annealing schedule until convergence.

    The E-step uses tempered softmax posteriors when gamma_t = 0 and the
    normalized diagonal of the exponential weight otherwise.  Stops once the
    schedule has settled at (beta, gamma) = (1, 0) and the relative objective
    change drops below ``config.tolerance``, or at ``config.max_iterations``.
    """
    return _fit(data, init, config, means_only=False)


def means_only_fit(data: Dataset, init: MixtureParams,
                   config: EstimatorConfig) -> FitResult:
    """Same loop as :func:`run_fit`, but the M-step updates only the means;
    weights and covariances stay at their ``init`` values.

    A component whose effective count vanishes keeps its previous mean (there
    is nothing to divide by and any mean maximizes its zero-weight term).
    """
    return _fit(data, init, config, means_only=True)


def _fit(data: Dataset, init: MixtureParams, config: EstimatorConfig,
         means_only: bool) -> FitResult:
    schedule = config.effective_schedule
    rng = np.random.default_rng(config.seed)
    theta = init
    trajectory = [init]
    history: list[float] = []
    converged = False
    failure: str | None = None

    t = 0
    while t < config.max_iterations:
        beta, gamma = schedule.at(t)
        if beta * gamma < _GAMMA_CUTOFF:
            gamma = 0.0
        energies = energy_matrix(data, theta)
        try:
            resp, log_z = responsibility_rows(energies, beta, gamma)
        except NumericalRangeError:
            history.append(np.nan)
            failure = "numerical_range"
            break
        objective = float(log_z.sum() / beta)
        history.append(objective)
        if (
            t > 0
            and _schedule_settled(beta, gamma)
            and abs(objective - history[-2])
            <= config.tolerance * max(1.0, abs(objective))
        ):
            converged = True
            break
        try:
            theta = _update(data, theta, resp, config, rng, means_only)
        except EmptyComponentError:
            failure = "empty_component"
            break
        trajectory.append(theta)
        t += 1
    else:
        # ran out of iterations: close the history for the last parameters
        beta, gamma = schedule.at(config.max_iterations)
        if beta * gamma < _GAMMA_CUTOFF:
            gamma = 0.0
        history.append(negative_free_energy(data, theta, beta, gamma))

    return FitResult(
        final_params=trajectory[-1],
        objective_history=np.asarray(history),
        param_trajectory=trajectory,
        iterations=len(trajectory) - 1,
        converged=converged,
        failure_reason=failure,
    )


def _update(data: Dataset, theta: MixtureParams, resp: np.ndarray,
            config: EstimatorConfig, rng: np.random.Generator,
            means_only: bool) -> MixtureParams:
    if means_only:
        return _means_only_update(data, theta, resp)
    if config.empty_component_policy == "abort":
        return m_step(data, resp, eps_cov=config.eps_cov)
    counts, weights, means, covs = weighted_update_arrays(
        data.points, resp, eps_cov=config.eps_cov
    )
    empty = counts < data.n * EMPTY_COMPONENT_FRACTION
    if empty.any():
        weights, means, covs = _reseed_components(
            data, weights, means, covs, empty, rng, config.eps_cov
        )
    return MixtureParams.from_arrays(weights, means, covs, eps_floor=config.eps_cov)


def _means_only_update(data: Dataset, theta: MixtureParams,
                       resp: np.ndarray) -> MixtureParams:
    counts = resp.sum(axis=0)
    threshold = data.n * EMPTY_COMPONENT_FRACTION
    with np.errstate(invalid="ignore", divide="ignore"):
        new_means = (resp.T @ data.points) / counts[:, None]
    components = []
    for j, comp in enumerate(theta.components):
        mean = new_means[j] if counts[j] >= threshold else comp.mean
        components.append(
            GaussianComponent(comp.weight, mean, comp.covariance, eps_floor=0.0)
        )
    return MixtureParams(components)


def _reseed_components(data: Dataset, weights, means, covs, empty_mask,
                       rng: np.random.Generator, eps_cov: float):
    """Move empty components to random data points with the global covariance."""
    pts = data.points
    centered = pts - pts.mean(axis=0)
    base_cov = centered.T @ centered / data.n
    base_cov = 0.5 * (base_cov + base_cov.T) + eps_cov * np.eye(data.dim)
    k = weights.shape[0]
    for j in np.flatnonzero(empty_mask):
        means[j] = pts[rng.integers(data.n)]
        covs[j] = base_cov
        weights[j] = 1.0 / k
    weights = weights / weights.sum()
    return weights, means, covs


def default_init_sampler(data: Dataset, n_components: int,
                         rng: np.random.Generator,
                         eps_cov: float = DEFAULT_EPS_COV) -> MixtureParams:
    """Random starting point: means uniform over the data bounding box,
    covariances equal to the global data covariance, weights uniform."""
    pts = data.points
    lo = pts.min(axis=0)
    hi = pts.max(axis=0)
    means = rng.uniform(lo, hi, size=(n_components, data.dim))
    centered = pts - pts.mean(axis=0)
    cov = centered.T @ centered / data.n
    cov = 0.5 * (cov + cov.T) + eps_cov * np.eye(data.dim)
    weights = np.full(n_components, 1.0 / n_components)
    covs = np.broadcast_to(cov, (n_components, data.dim, data.dim)).copy()
    return MixtureParams.from_arrays(weights, means, covs, eps_floor=eps_cov)
