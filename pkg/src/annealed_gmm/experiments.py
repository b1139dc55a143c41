"""Experiment harness: synthetic mixture data, multi-trial success-ratio
benchmarks with shared initializations, free-energy landscape grids, and
trajectory comparisons from a common starting point.

Benchmark trials are independent; they can run in parallel worker processes
and the report is a deterministic reduction ordered by trial index.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_EPS_COV, Dataset, MixtureParams, log_likelihood
from .errors import EmptyReportError, InvalidWeightError
from .estimators import (
    EstimatorConfig,
    FitResult,
    default_init_sampler,
    means_only_fit,
    run_fit,
)
from .quantum import negative_free_energy

_WEIGHT_SUM_TOL = 1e-10


@dataclass
class GeneratorSpec:
    """Ground-truth mixture plus sample size and seed for synthetic data."""

    n_components: int
    dim: int
    weights: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    n_samples: int
    seed: int

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float)
        self.means = np.asarray(self.means, dtype=float).reshape(
            self.n_components, self.dim
        )
        self.covariances = np.asarray(self.covariances, dtype=float).reshape(
            self.n_components, self.dim, self.dim
        )
        if abs(self.weights.sum() - 1.0) > _WEIGHT_SUM_TOL:
            raise InvalidWeightError(
                f"generator weights sum to {self.weights.sum()!r}"
            )
        if self.n_samples < self.n_components:
            raise ValueError("need at least one sample per component")

    def ground_truth(self) -> MixtureParams:
        return MixtureParams.from_arrays(self.weights, self.means, self.covariances)


def generate_dataset(spec: GeneratorSpec) -> Dataset:
    """Draw N i.i.d. points: a component by weight, then a Gaussian sample.

    Deterministic in ``spec.seed``; labels and the generating parameters are
    recorded on the returned dataset.
    """
    truth = spec.ground_truth()
    rng = np.random.default_rng(spec.seed)
    labels = rng.choice(spec.n_components, size=spec.n_samples, p=spec.weights)
    normals = rng.standard_normal((spec.n_samples, spec.dim))
    chols = np.linalg.cholesky(spec.covariances)
    points = spec.means[labels] + np.einsum("nij,nj->ni", chols[labels], normals)
    return Dataset(points, ground_truth=truth, labels=labels)


@dataclass
class EstimatorStats:
    """Per-estimator benchmark aggregate; ``final_log_likelihoods`` holds one
    entry per trial (NaN where the trial failed)."""

    label: str
    trials: int
    successes: int
    success_ratio: float
    mean_final_objective: float
    mean_iterations: float
    failures: int
    final_log_likelihoods: np.ndarray


@dataclass
class BenchmarkReport:
    """Success ratios of all estimators against the best objective seen."""

    estimators: list[EstimatorStats]
    success_threshold: float
    best_objective: float
    trials: int
    seed: int

    def by_label(self, label: str) -> EstimatorStats:
        for stats in self.estimators:
            if stats.label == label:
                return stats
        raise KeyError(label)


def _estimator_labels(configs: list[EstimatorConfig]) -> list[str]:
    labels = []
    seen: dict[str, int] = {}
    for cfg in configs:
        count = seen.get(cfg.mode, 0)
        labels.append(cfg.mode if count == 0 else f"{cfg.mode}#{count}")
        seen[cfg.mode] = count + 1
    return labels


def _run_trial(task):
    """One benchmark trial: every estimator from the same initialization."""
    data, configs, init, fit_seeds = task
    results = []
    for cfg, fit_seed in zip(configs, fit_seeds):
        fit = run_fit(data, init, _with_seed(cfg, fit_seed))
        if fit.failure_reason is None:
            results.append((log_likelihood(data, fit.final_params),
                            fit.iterations, None))
        else:
            results.append((np.nan, fit.iterations, fit.failure_reason))
    return results


def _with_seed(cfg: EstimatorConfig, seed: int) -> EstimatorConfig:
    return EstimatorConfig(
        mode=cfg.mode,
        schedule=cfg.schedule,
        max_iterations=cfg.max_iterations,
        tolerance=cfg.tolerance,
        empty_component_policy=cfg.empty_component_policy,
        eps_cov=cfg.eps_cov,
        seed=seed,
    )


def run_benchmark(data: Dataset, configs: list[EstimatorConfig], trials: int,
                  init_sampler=None, success_threshold: float = 1.0,
                  n_components: int | None = None, seed: int = 0,
                  n_jobs: int = 1) -> BenchmarkReport:
    """Run every estimator ``trials`` times from shared per-trial inits.

    Each trial's initialization is presented to every estimator, so the
    comparison is fair.  A trial succeeds for an estimator when its final
    log-likelihood is within ``success_threshold`` of the best final
    log-likelihood observed anywhere in the benchmark.  Failed fits (empty
    component, numerical range) never count as successes and are excluded
    from the best-objective scan and the per-estimator means.

    ``init_sampler(data, rng) -> MixtureParams`` defaults to uniform means in
    the data bounding box with the global covariance; ``n_components`` is
    required for the default sampler unless the dataset carries ground truth.
    The top-level ``seed`` derives one init stream per trial and separate fit
    streams per (trial, estimator) via ``numpy.random.SeedSequence.spawn``.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    if not configs:
        raise ValueError("need at least one estimator config")
    if init_sampler is None:
        if n_components is None:
            if data.ground_truth is None:
                raise ValueError(
                    "n_components is required when the dataset has no ground truth"
                )
            n_components = data.ground_truth.n_components

        def init_sampler(d, rng):
            return default_init_sampler(d, n_components, rng)

    root = np.random.SeedSequence(seed)
    init_seq, fit_seq = root.spawn(2)
    inits = [
        init_sampler(data, np.random.default_rng(s))
        for s in init_seq.spawn(trials)
    ]
    fit_seeds = [
        [int(s.generate_state(1)[0]) for s in trial_seq.spawn(len(configs))]
        for trial_seq in fit_seq.spawn(trials)
    ]
    tasks = [(data, configs, inits[t], fit_seeds[t]) for t in range(trials)]

    if n_jobs > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            outcomes = list(pool.map(_run_trial, tasks, chunksize=4))
    else:
        outcomes = [_run_trial(task) for task in tasks]

    labels = _estimator_labels(configs)
    lls = np.array([[trial[e][0] for trial in outcomes]
                    for e in range(len(configs))])
    iters = np.array([[trial[e][1] for trial in outcomes]
                      for e in range(len(configs))], dtype=float)
    completed = np.isfinite(lls)
    if not completed.any():
        raise EmptyReportError("every trial of every estimator failed")
    best = float(np.nanmax(lls))

    stats = []
    for e, label in enumerate(labels):
        ok = completed[e]
        successes = int(np.sum(lls[e][ok] >= best - success_threshold))
        stats.append(EstimatorStats(
            label=label,
            trials=trials,
            successes=successes,
            success_ratio=successes / trials,
            mean_final_objective=float(np.mean(lls[e][ok])) if ok.any() else float("nan"),
            mean_iterations=float(np.mean(iters[e][ok])) if ok.any() else float("nan"),
            failures=int(np.sum(~ok)),
            final_log_likelihoods=lls[e],
        ))
    return BenchmarkReport(
        estimators=stats,
        success_threshold=success_threshold,
        best_objective=best,
        trials=trials,
        seed=seed,
    )


@dataclass
class ParameterSelector:
    """Addresses one scalar inside a mixture: a mean coordinate or a diagonal
    covariance entry of one component."""

    kind: str
    component: int
    index: int = 0

    def __post_init__(self):
        if self.kind not in ("mean", "covariance"):
            raise ValueError(f"unknown selector kind {self.kind!r}")


def _substitute(base: MixtureParams, selectors, values) -> MixtureParams:
    weights = base.weights
    means = base.means.copy()
    covs = base.covariances.copy()
    for sel, value in zip(selectors, values):
        if sel.kind == "mean":
            means[sel.component, sel.index] = value
        else:
            covs[sel.component, sel.index, sel.index] = value
    return MixtureParams.from_arrays(weights, means, covs, eps_floor=0.0)


@dataclass
class LandscapeGrid:
    """Negative free energy over a 2-d slice of parameter space;
    ``values[i, j]`` belongs to ``(axis1[i], axis2[j])``."""

    axis1: np.ndarray
    axis2: np.ndarray
    values: np.ndarray
    beta: float
    gamma: float


def landscape(data: Dataset, base: MixtureParams, axis_params, grid,
              beta: float, gamma: float) -> LandscapeGrid:
    """Evaluate the negative free energy over a grid of two scalar parameters.

    ``axis_params`` is a pair of :class:`ParameterSelector`; ``grid`` a pair of
    1-d value arrays.  All other parameters stay at ``base``.
    """
    sel1, sel2 = axis_params
    axis1 = np.asarray(grid[0], dtype=float)
    axis2 = np.asarray(grid[1], dtype=float)
    if axis1.size == 0 or axis2.size == 0:
        raise ValueError("landscape grid is empty")
    values = np.empty((axis1.size, axis2.size))
    for i, a in enumerate(axis1):
        for j, b in enumerate(axis2):
            params = _substitute(base, (sel1, sel2), (a, b))
            values[i, j] = negative_free_energy(data, params, beta, gamma)
    return LandscapeGrid(axis1=axis1, axis2=axis2, values=values,
                         beta=beta, gamma=gamma)


def count_local_maxima(values: np.ndarray) -> int:
    """Strict 8-neighbor local maxima; ties are not maxima.  Border cells
    compare against their available neighbors only."""
    values = np.asarray(values, dtype=float)
    padded = np.full((values.shape[0] + 2, values.shape[1] + 2), -np.inf)
    padded[1:-1, 1:-1] = values
    is_max = np.ones_like(values, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbor = padded[1 + di:padded.shape[0] - 1 + di,
                              1 + dj:padded.shape[1] - 1 + dj]
            is_max &= values > neighbor
    return int(is_max.sum())


def trajectory_experiment(data: Dataset, init: MixtureParams,
                          configs: list[EstimatorConfig],
                          means_only: bool = False) -> list[FitResult]:
    """Run each estimator from the identical initialization and return the
    full fit results for overlay on a landscape grid."""
    fit = means_only_fit if means_only else run_fit
    return [fit(data, init, cfg) for cfg in configs]
