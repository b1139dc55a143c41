"""Gaussian mixture maximum-likelihood estimation with three E-step flavors:
plain EM, deterministic simulated-annealing EM (tempered posteriors), and
deterministic quantum-annealing EM (ring-mixed exponential weights), plus an
experiment harness for success-ratio benchmarks and free-energy landscapes.
"""

from .core import (
    DEFAULT_EPS_COV,
    Dataset,
    GaussianComponent,
    MixtureParams,
    classical_energies,
    em_posterior,
    log_gaussian_pdf,
    log_likelihood,
    m_step,
)
from .errors import (
    AsymmetryError,
    ConfigError,
    EmptyComponentError,
    EmptyDatasetError,
    EmptyReportError,
    InvalidOrderError,
    InvalidWeightError,
    NumericalRangeError,
    SingularCovarianceError,
)
from .estimators import (
    AnnealingSchedule,
    EstimatorConfig,
    FitResult,
    default_init_sampler,
    means_only_fit,
    run_fit,
    schedule_at,
)
from .experiments import (
    BenchmarkReport,
    GeneratorSpec,
    LandscapeGrid,
    ParameterSelector,
    count_local_maxima,
    generate_dataset,
    landscape,
    run_benchmark,
    trajectory_experiment,
)
from .quantum import (
    QuantumWeight,
    build_sigma_nc,
    matrix_exp_symmetric,
    negative_free_energy,
    quantum_weight,
    trotter_diagonal,
)

__version__ = "0.1.0"

__all__ = [
    "AnnealingSchedule",
    "AsymmetryError",
    "BenchmarkReport",
    "ConfigError",
    "Dataset",
    "DEFAULT_EPS_COV",
    "EmptyComponentError",
    "EmptyDatasetError",
    "EmptyReportError",
    "EstimatorConfig",
    "FitResult",
    "GaussianComponent",
    "GeneratorSpec",
    "InvalidOrderError",
    "InvalidWeightError",
    "LandscapeGrid",
    "MixtureParams",
    "NumericalRangeError",
    "ParameterSelector",
    "QuantumWeight",
    "SingularCovarianceError",
    "build_sigma_nc",
    "classical_energies",
    "count_local_maxima",
    "default_init_sampler",
    "em_posterior",
    "generate_dataset",
    "landscape",
    "log_gaussian_pdf",
    "log_likelihood",
    "m_step",
    "matrix_exp_symmetric",
    "means_only_fit",
    "negative_free_energy",
    "quantum_weight",
    "run_benchmark",
    "run_fit",
    "schedule_at",
    "trajectory_experiment",
    "trotter_diagonal",
    "__version__",
]
