import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from annealed_gmm import Dataset, MixtureParams


def random_params(rng, k, d, spread=3.0):
    """Random valid mixture: Dirichlet-ish weights, scattered means, SPD covs."""
    weights = rng.uniform(0.5, 2.0, size=k)
    weights = weights / weights.sum()
    means = rng.uniform(-spread, spread, size=(k, d))
    covs = np.empty((k, d, d))
    for j in range(k):
        a = rng.standard_normal((d, d))
        covs[j] = a @ a.T + (0.3 + rng.uniform()) * np.eye(d)
    return MixtureParams.from_arrays(weights, means, covs)


def random_dataset(rng, n, d, spread=3.0):
    return Dataset(rng.uniform(-spread, spread, size=(n, d)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240803)
