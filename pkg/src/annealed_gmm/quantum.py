"""Quantum-annealing kernel: the ring mixing operator, exact symmetric matrix
exponentials, exponential weights with their normalized diagonals, the
product-formula diagonal used as a numerical cross-check, and the negative
free energy.

The K x K Hamiltonian of a data point is diag(h^1, ..., h^K) + gamma * R,
where R is the ring adjacency operator returned by :func:`build_sigma_nc`.
Before exponentiation the diagonal is shifted by c = min_k h^k; the shift is
exact for responsibilities and is re-added analytically in log partition
values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, softmax

from .core import Dataset, MixtureParams, energy_matrix
from .errors import AsymmetryError, InvalidOrderError, NumericalRangeError

_SYMMETRY_TOL = 1e-10


def build_sigma_nc(n_components: int) -> np.ndarray:
    """Ring mixing operator: sum over k and l = k +/- 1 (mod K) of |l><k|.

    Entry (l, k) counts how many of the two ring neighbors of k equal l, so
    for K >= 3 this is the cycle adjacency matrix, while for K = 2 both
    neighbors of each state coincide and the off-diagonal entries are 2.
    """
    if n_components < 2:
        raise InvalidOrderError(
            f"ring operator needs at least 2 states, got {n_components}"
        )
    mat = np.zeros((n_components, n_components), dtype=int)
    for k in range(n_components):
        mat[(k - 1) % n_components, k] += 1
        mat[(k + 1) % n_components, k] += 1
    return mat


def matrix_exp_symmetric(matrix: np.ndarray) -> np.ndarray:
    """exp(A) of a symmetric matrix via eigendecomposition; output symmetrized.

    Raises:
        AsymmetryError: max |A - A^T| exceeds 1e-10.
    """
    matrix = np.asarray(matrix, dtype=float)
    asym = float(np.max(np.abs(matrix - matrix.T))) if matrix.size else 0.0
    if asym > _SYMMETRY_TOL:
        raise AsymmetryError(f"matrix asymmetric by {asym:.3e}")
    return _sym_expm(0.5 * (matrix + matrix.T))


def _sym_expm(matrix: np.ndarray) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(matrix)
    out = (eigvecs * np.exp(eigvals)) @ eigvecs.T
    return 0.5 * (out + out.T)


@dataclass
class QuantumWeight:
    """Exponential weight of one data point, stored in shifted form.

    ``matrix`` is exp(-beta * (diag(h - shift) + gamma * R)) with
    shift = min_k h^k, ``trace`` its trace, and ``diag_responsibilities``
    the normalized diagonal.  The unshifted partition value is recovered as
    ``log_partition`` = -beta * shift + ln(trace); responsibilities are
    invariant under the shift.
    """

    matrix: np.ndarray
    trace: float
    diag_responsibilities: np.ndarray
    shift: float
    beta: float
    gamma: float

    @property
    def log_partition(self) -> float:
        return float(-self.beta * self.shift + np.log(self.trace))


def quantum_weight(energies, beta: float, gamma: float) -> QuantumWeight:
    """Exponential weight exp(-beta(H + gamma R)) and its normalized diagonal.

    At gamma = 0 the diagonal responsibilities equal softmax(-beta * h).

    Raises:
        NumericalRangeError: the shifted exponential still left floating-point
            range (reports beta, gamma, and the energy spread).
    """
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    if energies.ndim != 1:
        raise ValueError("energies must be a length-K vector")
    if not np.all(np.isfinite(energies)):
        raise ValueError("energies must be finite")
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if gamma < 0.0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    k = energies.shape[0]
    if k < 2:
        raise InvalidOrderError(f"need at least 2 components, got {k}")
    shift = float(energies.min())
    hamiltonian = np.diag(energies - shift) + gamma * build_sigma_nc(k)
    with np.errstate(over="ignore"):
        weight = _sym_expm(-beta * hamiltonian)
    trace = float(np.trace(weight))
    if not np.isfinite(weight).all() or not (trace > 0.0):
        raise NumericalRangeError(beta, gamma, float(np.ptp(energies)))
    return QuantumWeight(
        matrix=weight,
        trace=trace,
        diag_responsibilities=np.diag(weight) / trace,
        shift=shift,
        beta=beta,
        gamma=gamma,
    )


def trotter_diagonal(energies, beta: float, gamma: float, n_slices: int) -> np.ndarray:
    """Diagonal of [exp(-(beta/M) H) exp(-(beta/M) gamma R)]^M, M = ``n_slices``.

    First-order product formula with periodic boundary conditions; converges
    to the exact diagonal as M grows, with error O(1/M).  The ring factor is
    exponentiated exactly.
    """
    if n_slices < 1:
        raise ValueError(f"need at least one slice, got {n_slices}")
    energies = np.atleast_1d(np.asarray(energies, dtype=float))
    k = energies.shape[0]
    if k < 2:
        raise InvalidOrderError(f"need at least 2 components, got {k}")
    shift = float(energies.min())
    step = beta / n_slices
    diag_factor = np.exp(-step * (energies - shift))
    ring_factor = _sym_expm(-step * gamma * build_sigma_nc(k))
    slice_matrix = diag_factor[:, None] * ring_factor
    product = np.linalg.matrix_power(slice_matrix, n_slices)
    # undo the diagonal shift: the true product is exp(-beta*shift) times this
    return np.exp(-beta * shift) * np.diag(product)


def log_partition_rows(energies: np.ndarray, beta: float, gamma: float) -> np.ndarray:
    """ln Tr exp(-beta(H_i + gamma R)) for a batch of energy rows (N x K)."""
    if gamma == 0.0:
        return logsumexp(-beta * energies, axis=1)
    eigvals = np.linalg.eigvalsh(_batch_hamiltonians(energies, beta, gamma))
    shift = energies.min(axis=1)
    return -beta * shift + logsumexp(eigvals, axis=1)


def responsibility_rows(energies: np.ndarray, beta: float, gamma: float):
    """Batched E-step: per-point responsibilities and log partition values.

    Returns ``(resp, log_z)`` where ``resp[i]`` is the normalized diagonal of
    the exponential weight of point i and ``log_z[i]`` its ln Tr value.  At
    gamma = 0 this is the tempered softmax of -beta * h.
    """
    if gamma == 0.0:
        scaled = -beta * energies
        return softmax(scaled, axis=1), logsumexp(scaled, axis=1)
    eigvals, eigvecs = np.linalg.eigh(_batch_hamiltonians(energies, beta, gamma))
    top = eigvals.max(axis=1, keepdims=True)
    scaled = np.exp(eigvals - top)
    diag = np.einsum("nkj,nj->nk", eigvecs * eigvecs, scaled)
    norm = scaled.sum(axis=1)
    if not np.all(np.isfinite(norm)) or np.any(norm <= 0.0):
        raise NumericalRangeError(beta, gamma, float(np.ptp(energies)))
    resp = diag / norm[:, None]
    shift = energies.min(axis=1)
    log_z = -beta * shift + top[:, 0] + np.log(norm)
    return resp, log_z


def _batch_hamiltonians(energies: np.ndarray, beta: float, gamma: float) -> np.ndarray:
    """-beta * (diag(h_i - min h_i) + gamma R), stacked as (N, K, K)."""
    n, k = energies.shape
    shifted = energies - energies.min(axis=1, keepdims=True)
    out = np.broadcast_to(
        (-beta * gamma) * build_sigma_nc(k).astype(float), (n, k, k)
    ).copy()
    idx = np.arange(k)
    out[:, idx, idx] -= beta * shifted
    return out


def negative_free_energy(data: Dataset, params: MixtureParams,
                         beta: float, gamma: float) -> float:
    """(1/beta) * sum_i ln Tr exp(-beta(H_i + gamma R)).

    Equals the log-likelihood at beta = 1, gamma = 0.
    """
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if gamma < 0.0:
        raise ValueError(f"gamma must be nonnegative, got {gamma}")
    energies = energy_matrix(data, params)
    return float(np.sum(log_partition_rows(energies, beta, gamma)) / beta)
