"""The isotropic pairwise GMRF model.

Each site x_i conditioned on its Moore neighborhood is Gaussian with mean
``mu + beta * sum_j (x_j - mu)`` and variance ``sigma2``. The product of
these local conditional densities over all sites is the pseudo-likelihood,
which admits a curved-exponential-family decomposition with five sufficient
statistics; both forms are implemented and cross-checked in the tests.
All logarithms are natural.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import Configuration, neighbor_sums

#: Neighborhood supports with an isotropic closed form (8 is the tested default).
VALID_DELTAS = (4, 8, 12, 20, 24)


@dataclass(frozen=True)
class ModelParams:
    """Model parameters theta = (mu, sigma2, beta) plus neighborhood size delta."""

    mu: float = 0.0
    sigma2: float = 1.0
    beta: float = 0.0
    delta: int = 8

    def __post_init__(self) -> None:
        if not self.sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {self.sigma2}")
        if self.delta not in VALID_DELTAS:
            raise ValueError(f"delta must be one of {VALID_DELTAS}, got {self.delta}")


@dataclass(frozen=True)
class NaturalStatistics:
    """The five sufficient statistics of the curved exponential family.

    t1 = sum_i x_i
    t2 = sum_i x_i^2
    t3 = sum_i sum_{j in eta_i} x_i x_j
    t4 = sum_i sum_{j in eta_i} x_j
    t5 = sum_i (sum_{j in eta_i} x_j)^2
    """

    t1: float
    t2: float
    t3: float
    t4: float
    t5: float

    def as_vector(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.t3, self.t4, self.t5])


def lcdf_log_density(x: float, neighbor_values, params: ModelParams) -> float:
    """Log of the local conditional density of one site given its neighbors."""
    nv = np.asarray(neighbor_values, dtype=np.float64)
    centered_sum = float(nv.sum()) - nv.size * params.mu
    resid = (x - params.mu) - params.beta * centered_sum
    return (
        -0.5 * math.log(2.0 * math.pi * params.sigma2)
        - resid * resid / (2.0 * params.sigma2)
    )


def natural_statistics(config: Configuration) -> NaturalStatistics:
    """The five sufficient statistics of a configuration (toroidal neighborhoods)."""
    x = config.cells
    s = neighbor_sums(config)
    return NaturalStatistics(
        t1=float(x.sum()),
        t2=float(x @ x),
        t3=float(x @ s),
        t4=float(s.sum()),
        t5=float(s @ s),
    )


def natural_parameter_vector(params: ModelParams) -> np.ndarray:
    """The coefficient vector c(theta) pairing with the natural statistics."""
    mu, s2, b, d = params.mu, params.sigma2, params.beta, params.delta
    a = mu * (1.0 - b * d)
    return np.array(
        [
            a / s2,
            -1.0 / (2.0 * s2),
            b / s2,
            -b * a / s2,
            -b * b / (2.0 * s2),
        ]
    )


def log_density_offset(params: ModelParams, n_sites: int) -> float:
    """The statistic-free term d(theta) of the exponential-family decomposition."""
    mu, s2, b, d = params.mu, params.sigma2, params.beta, params.delta
    return (
        -(n_sites / 2.0) * (math.log(2.0 * math.pi * s2) + mu * mu / s2)
        + b * d * mu * mu * n_sites / s2 * (1.0 - b * d / 2.0)
    )


def log_pseudo_likelihood(config: Configuration, params: ModelParams) -> float:
    """Sum of the LCDF log-densities over all sites."""
    x = config.cells
    centered_sums = neighbor_sums(config) - params.delta * params.mu
    resid = (x - params.mu) - params.beta * centered_sums
    return (
        -(config.n_sites / 2.0) * math.log(2.0 * math.pi * params.sigma2)
        - float(resid @ resid) / (2.0 * params.sigma2)
    )
