"""Exception types raised across the package.

Validation problems (bad shapes, invalid parameters, malformed files) are
``ValueError`` subclasses; failures that can only be detected while a
computation is running are ``RuntimeError`` subclasses.
"""


class SingularCovarianceError(ValueError):
    """Covariance matrix is not positive definite above the regularization floor."""


class InvalidWeightError(ValueError):
    """Mixture weight is non-positive, above one, or weights do not sum to one."""


class InvalidOrderError(ValueError):
    """Number of mixture components K is below the minimum of 2."""


class EmptyDatasetError(ValueError):
    """Dataset contains no points."""


class AsymmetryError(ValueError):
    """Matrix expected to be symmetric is not, beyond tolerance."""


class ConfigError(ValueError):
    """Run-configuration file violates the documented schema."""


class EmptyComponentError(RuntimeError):
    """A component's effective count N_k fell below N * 1e-12 in the M-step.

    The caller decides whether to abort the trial or reseed the component.
    """

    def __init__(self, component: int, count: float):
        self.component = component
        self.count = count
        super().__init__(
            f"component {component} has effective count {count:.3e}; "
            "responsibilities assign it (numerically) no data"
        )


class NumericalRangeError(RuntimeError):
    """Exponential weight over- or underflowed despite the stability shift."""

    def __init__(self, beta: float, gamma: float, energy_spread: float):
        self.beta = beta
        self.gamma = gamma
        self.energy_spread = energy_spread
        super().__init__(
            f"exponential weight out of floating-point range "
            f"(beta={beta!r}, gamma={gamma!r}, energy spread={energy_spread!r})"
        )


class EmptyReportError(RuntimeError):
    """Every benchmark trial failed numerically; no report can be produced."""
