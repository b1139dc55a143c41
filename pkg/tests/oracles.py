"""Independent oracles used only by the tests.

These deliberately avoid the code paths they check: the matrix exponential
uses scaling-and-squaring on a truncated Taylor series instead of an
eigendecomposition, the log-likelihood oracle uses naive double summation
instead of log-sum-exp, and the M-step oracle uses plain Python loops.
"""

import math

import numpy as np


def series_expm(matrix, n_taylor=24, n_square=10):
    """exp(A) via scaling and squaring of a truncated Taylor series."""
    matrix = np.asarray(matrix, dtype=float)
    n = matrix.shape[0]
    scaled = matrix / 2.0**n_square
    term = np.eye(n)
    acc = np.eye(n)
    for i in range(1, n_taylor + 1):
        term = term @ scaled / i
        acc = acc + term
    for _ in range(n_square):
        acc = acc @ acc
    return acc


def naive_log_likelihood(points, weights, means, covariances):
    """Double-sum log-likelihood with raw densities (no log-sum-exp)."""
    total = 0.0
    for y in points:
        mix = 0.0
        for w, mu, cov in zip(weights, means, covariances):
            d = len(mu)
            diff = np.asarray(y) - np.asarray(mu)
            inv = np.linalg.inv(cov)
            det = np.linalg.det(cov)
            dens = math.exp(-0.5 * diff @ inv @ diff) / math.sqrt(
                (2.0 * math.pi) ** d * det
            )
            mix += w * dens
        total += math.log(mix)
    return total


def loop_weighted_update(points, resp, eps_cov):
    """M-step algebra with explicit loops: counts, weights, means, covariances."""
    n, d = points.shape
    k = resp.shape[1]
    counts = np.zeros(k)
    means = np.zeros((k, d))
    covs = np.zeros((k, d, d))
    for j in range(k):
        for i in range(n):
            counts[j] += resp[i, j]
            means[j] += resp[i, j] * points[i]
        means[j] /= counts[j]
        for i in range(n):
            diff = points[i] - means[j]
            covs[j] += resp[i, j] * np.outer(diff, diff)
        covs[j] /= counts[j]
        covs[j] = 0.5 * (covs[j] + covs[j].T) + eps_cov * np.eye(d)
    return counts, counts / n, means, covs


def ring_matrix_by_formula(k):
    """Sum over states of |l><k| for l = k - 1 and l = k + 1 with wraparound,
    written as the literal double loop over (k, l) pairs."""
    mat = np.zeros((k, k), dtype=int)
    for state in range(1, k + 1):
        for neighbor in (state - 1, state + 1):
            wrapped = neighbor
            if wrapped == 0:
                wrapped = k
            elif wrapped == k + 1:
                wrapped = 1
            mat[wrapped - 1, state - 1] += 1
    return mat
