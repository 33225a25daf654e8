"""Brute-force verification of the closed forms.

The closed-form tensors in :mod:`gmrf_infogeo.infogeo` are derived from
expectations over the joint Gaussian law of a site and its 8 neighbors.
This module evaluates those defining expectations directly by Monte-Carlo
sampling from an explicit 9-dimensional Gaussian, isolating formula
verification from any MCMC convergence question. It also checks the
Isserlis fourth-moment identity the derivations rely on, and provides the
direct site-sum form of the beta estimator as a cross-check for the
covariance-ratio form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .gmrf import ModelParams
from .infogeo import NEIGHBOR_COLUMNS, DegenerateFieldError
from .lattice import PATCH_CENTER, Configuration, neighbor_sums

COMPONENTS = ("mumu", "s2s2", "s2b", "bb")
KINDS = ("type-1", "type-2")

_CHUNK = 1_000_000


@dataclass(frozen=True)
class NeighborhoodModel:
    """Joint Gaussian law of one site and its 8 neighbors.

    ``cov9`` is the 9x9 covariance of the patch vector (center at index 4);
    all coordinates share the scalar ``mean``. The matrix must be symmetric
    and positive semi-definite.
    """

    mean: float
    cov9: np.ndarray

    def __post_init__(self) -> None:
        cov = np.array(self.cov9, dtype=np.float64)
        if cov.shape != (9, 9):
            raise ValueError(f"cov9 must be 9x9, got shape {cov.shape}")
        if not np.allclose(cov, cov.T, atol=1e-10):
            raise ValueError("cov9 must be symmetric")
        if np.linalg.eigvalsh(cov).min() < -1e-10:
            raise ValueError("cov9 must be positive semi-definite")
        cov.setflags(write=False)
        object.__setattr__(self, "cov9", cov)


class MonteCarloEstimate(NamedTuple):
    estimate: float
    std_error: float


class IsserlisCheck(NamedTuple):
    mc: float
    closed: float
    std_error: float


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    """A factor L with L L^T = cov, valid for semi-definite matrices."""
    eigval, eigvec = np.linalg.eigh(cov)
    return eigvec * np.sqrt(np.clip(eigval, 0.0, None))


def _fisher_integrand(samples: np.ndarray, params: ModelParams, which: str, kind: str):
    """Pointwise integrand of the requested Fisher expectation.

    First derivatives of the LCDF log-density are analytic in the residual
    e = (x - mu) - beta * S and the centered neighbor sum S; second
    derivatives likewise. Type-1 averages products of first derivatives,
    type-2 averages negative second derivatives.
    """
    mu, s2, b = params.mu, params.sigma2, params.beta
    d = float(params.delta)
    s4 = s2 * s2
    s6 = s4 * s2
    x = samples[:, PATCH_CENTER]
    s = samples[:, NEIGHBOR_COLUMNS].sum(axis=1) - d * mu
    e = (x - mu) - b * s
    if kind == "type-1":
        if which == "mumu":
            score = (1.0 - b * d) / s2 * e
            return score * score
        if which == "s2s2":
            score = e * e / (2.0 * s4) - 1.0 / (2.0 * s2)
            return score * score
        if which == "s2b":
            return (e * e / (2.0 * s4) - 1.0 / (2.0 * s2)) * (e * s / s2)
        if which == "bb":
            score = e * s / s2
            return score * score
    elif kind == "type-2":
        if which == "mumu":
            return np.full(len(samples), (1.0 - b * d) ** 2 / s2)
        if which == "s2s2":
            return e * e / s6 - 1.0 / (2.0 * s4)
        if which == "s2b":
            return e * s / s4
        if which == "bb":
            return s * s / s2
    raise ValueError(f"unknown component {which!r} / kind {kind!r}")


def mc_fisher_component(
    model: NeighborhoodModel,
    params: ModelParams,
    which: str,
    kind: str,
    n_samples: int,
    seed,
) -> MonteCarloEstimate:
    """Monte-Carlo estimate of one Fisher-information component.

    Samples (x_i, eta_i) jointly from ``model`` and averages the defining
    integrand; returns the estimate with its standard error. Requires at
    least 10^4 samples for the normal-theory error bar to be meaningful.
    """
    if which not in COMPONENTS:
        raise ValueError(f"which must be one of {COMPONENTS}, got {which!r}")
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
    if n_samples < 10_000:
        raise ValueError(f"n_samples must be >= 10000, got {n_samples}")
    if params.delta != 8:
        raise ValueError("the 9-D neighborhood oracle requires delta=8")
    rng = np.random.default_rng(seed)
    factor = _psd_factor(model.cov9)
    total = 0.0
    total_sq = 0.0
    remaining = n_samples
    while remaining > 0:
        size = min(remaining, _CHUNK)
        samples = model.mean + rng.standard_normal((size, 9)) @ factor.T
        values = _fisher_integrand(samples, params, which, kind)
        total += float(values.sum())
        total_sq += float(values @ values)
        remaining -= size
    mean = total / n_samples
    var = max(total_sq - n_samples * mean * mean, 0.0) / (n_samples - 1)
    return MonteCarloEstimate(mean, math.sqrt(var / n_samples))


def isserlis_fourth_moment(cov, n_samples: int, seed, indices=None) -> IsserlisCheck:
    """Monte-Carlo vs closed-form Gaussian fourth moment E[x_i x_j x_k x_l].

    ``cov`` is a k x k covariance (k from 1 to 4) of a zero-mean Gaussian
    vector and ``indices`` the four coordinates of the moment (repeats
    allowed). By default the coordinates cycle through the available ones,
    so a 1x1 cov gives E[x^4] and a diagonal 2x2 gives E[x^2 y^2]. The
    closed form is the Isserlis pairing sum
    ``c_ij c_kl + c_ik c_jl + c_il c_jk``.
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    k = cov.shape[0]
    if cov.shape != (k, k) or not 1 <= k <= 4:
        raise ValueError(f"cov must be k x k with 1 <= k <= 4, got {cov.shape}")
    if indices is None:
        indices = tuple(np.arange(4) % k)
    i, j, l, m = indices
    closed = cov[i, j] * cov[l, m] + cov[i, l] * cov[j, m] + cov[i, m] * cov[j, l]
    rng = np.random.default_rng(seed)
    factor = _psd_factor(cov)
    samples = rng.standard_normal((n_samples, k)) @ factor.T
    prod = samples[:, i] * samples[:, j] * samples[:, l] * samples[:, m]
    return IsserlisCheck(
        mc=float(prod.mean()),
        closed=float(closed),
        std_error=float(prod.std(ddof=1) / math.sqrt(n_samples)),
    )


def mpl_beta_direct(config: Configuration, mu_hat: float) -> float:
    """Direct site-sum form of the beta MPL estimate.

    beta_hat = sum_i (x_i - mu) S_i / sum_i S_i^2 with S_i the centered
    neighbor sum; equals the covariance-ratio form on toroidal grids up to
    floating-point summation order.
    """
    centered = config.cells - mu_hat
    s = neighbor_sums(config) - 8.0 * mu_hat
    denom = float(s @ s)
    if denom == 0.0:
        raise DegenerateFieldError("constant field; beta is unidentifiable")
    return float(centered @ s) / denom
