"""Patch-covariance statistics and closed-form information-geometric quantities.

Everything here is a function of the 9x9 patch covariance Sigma_p and its
decomposition into the neighbor block Sigma_p^- (8x8) and the center-to-
neighbor vector rho (8,). Two entry sums drive all formulas:

    A = ||rho||_+            (sum of center-to-neighbor covariances)
    B = ||Sigma_p^-||_+      (sum of all neighbor-block entries)

where ``||.||_+`` denotes the sum of all entries (not a norm). Kronecker
entry sums factor exactly, ``||M (x) N||_+ = ||M||_+ ||N||_+``, which is how
every tensor term involving a Kronecker product is evaluated.

Two metric tensors are provided: ``tensor_g1`` (type I, expectation of the
squared score) and ``tensor_g2`` (type II, negative expected Hessian). They
coincide when beta = 0 and diverge away from it; the component-wise
difference equals the closed higher-order remainder terms exercised in the
tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gmrf import ModelParams
from .lattice import PATCH_CENTER, Configuration, extract_patches

#: Patch columns holding neighbor values (everything but the center).
NEIGHBOR_COLUMNS = np.array([0, 1, 2, 3, 5, 6, 7, 8])

#: Below this entry-sum magnitude a neighbor block is treated as degenerate.
DEGENERATE_EPS = 1e-12


class DegenerateFieldError(ValueError):
    """The field carries no usable spatial signal (e.g. it is constant)."""


@dataclass(frozen=True)
class PatchStats:
    """Sample covariance of the 3x3 patch ensemble and its decomposition.

    ``sigma_p`` is the full 9x9 covariance (divisor n, per-coordinate mean
    centering), ``sigma_minus`` the 8x8 block with the center row/column
    removed, ``rho`` the center row without its middle element, and
    ``center_variance`` the removed central entry Var(x_i). ``degenerate``
    marks an ensemble of identical patches (zero covariance).
    """

    sigma_p: np.ndarray
    sigma_minus: np.ndarray
    rho: np.ndarray
    center_variance: float
    degenerate: bool = False


@dataclass(frozen=True)
class FisherTensor:
    """The four distinct nonzero components of a 3x3 metric tensor.

    x = I_mumu, y = I_s2s2, z = I_betabeta, w = I_s2beta; the (mu, s2) and
    (mu, beta) entries are structurally zero (odd Gaussian moments vanish),
    so the assembled matrix is [[x,0,0],[0,y,w],[0,w,z]].
    """

    x: float
    y: float
    z: float
    w: float
    kind: str  # "type-1" or "type-2"

    def matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.x, 0.0, 0.0],
                [0.0, self.y, self.w],
                [0.0, self.w, self.z],
            ]
        )


@dataclass(frozen=True)
class FieldEstimates:
    """Everything estimated from a single configuration snapshot.

    When ``degenerate`` is set the estimates that require spatial signal
    (beta_mpl, entropy, tensors, upsilon_beta) are NaN.
    """

    mu_hat: float
    sigma2_hat: float
    beta_mpl: float
    entropy: float
    g1: FisherTensor
    g2: FisherTensor
    upsilon_beta: float
    degenerate: bool


def patch_covariance(patches) -> PatchStats:
    """Sample covariance (divisor n) of an ensemble of 9-vector patches.

    Each coordinate is centered by its own sample mean. All-identical
    patches yield the zero matrix with the degenerate flag set rather than
    an error; fewer than two patches is an error.
    """
    pts = np.asarray(patches, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[1] != 9:
        raise ValueError(f"expected an (n, 9) patch array, got shape {pts.shape}")
    if pts.shape[0] < 2:
        raise ValueError("patch covariance needs at least 2 patches")
    centered = pts - pts.mean(axis=0)
    raw = centered.T @ centered / pts.shape[0]
    sigma_p = (raw + raw.T) / 2.0
    rho = sigma_p[PATCH_CENTER, NEIGHBOR_COLUMNS].copy()
    sigma_minus = sigma_p[np.ix_(NEIGHBOR_COLUMNS, NEIGHBOR_COLUMNS)].copy()
    return PatchStats(
        sigma_p=sigma_p,
        sigma_minus=sigma_minus,
        rho=rho,
        center_variance=float(sigma_p[PATCH_CENTER, PATCH_CENTER]),
        degenerate=not sigma_p.any(),
    )


def kron_sum(a, b) -> float:
    """Entry sum of a Kronecker product, ``||a (x) b||_+``.

    Uses the exact factorization ``||a||_+ * ||b||_+``; the product is never
    materialized.
    """
    return float(np.sum(a)) * float(np.sum(b))


def tensor_g1(params: ModelParams, stats: PatchStats) -> FisherTensor:
    """Type-I Fisher tensor: expectations of products of first derivatives."""
    b, s2, d = params.beta, params.sigma2, float(params.delta)
    a_sum = float(np.sum(stats.rho))
    b_sum = float(np.sum(stats.sigma_minus))
    rr = kron_sum(stats.rho, stats.rho)
    rm = kron_sum(stats.rho, stats.sigma_minus)
    mm = kron_sum(stats.sigma_minus, stats.sigma_minus)
    s4 = s2 * s2
    s6 = s4 * s2
    s8 = s6 * s2
    first_order = 2.0 * b * a_sum - b * b * b_sum
    x = (1.0 - b * d) ** 2 / s2 * (1.0 - first_order / s2)
    y = (
        1.0 / (2.0 * s4)
        - first_order / s6
        + (3.0 * b * b * rr - 3.0 * b**3 * rm + 0.75 * b**4 * mm) / s8
    )
    w = (a_sum - b * b_sum) / s4 - (
        6.0 * b * rr - 9.0 * b * b * rm + 3.0 * b**3 * mm
    ) / (2.0 * s6)
    z = b_sum / s2 + (2.0 * rr - 6.0 * b * rm + 3.0 * b * b * mm) / s4
    return FisherTensor(x=x, y=y, z=z, w=w, kind="type-1")


def tensor_g2(params: ModelParams, stats: PatchStats) -> FisherTensor:
    """Type-II Fisher tensor: negative expected second derivatives."""
    b, s2, d = params.beta, params.sigma2, float(params.delta)
    a_sum = float(np.sum(stats.rho))
    b_sum = float(np.sum(stats.sigma_minus))
    s4 = s2 * s2
    s6 = s4 * s2
    x = (1.0 - b * d) ** 2 / s2
    y = 1.0 / (2.0 * s4) - (2.0 * b * a_sum - b * b * b_sum) / s6
    w = (a_sum - b * b_sum) / s4
    z = b_sum / s2
    return FisherTensor(x=x, y=y, z=z, w=w, kind="type-2")


def entropy(params: ModelParams, stats: PatchStats) -> float:
    """Entropy of the local conditional model at the given state.

    Reduces to the Gaussian entropy 0.5*(log(2*pi*sigma2) + 1) when beta=0;
    spatial correlation enters through A and B only.
    """
    b, s2 = params.beta, params.sigma2
    a_sum = float(np.sum(stats.rho))
    b_sum = float(np.sum(stats.sigma_minus))
    return 0.5 * (math.log(2.0 * math.pi * s2) + 1.0) - (
        b * a_sum - (b * b / 2.0) * b_sum
    ) / s2


def mpl_beta(stats: PatchStats) -> float:
    """Maximum pseudo-likelihood estimate of beta: ``||rho||_+ / ||Sigma_p^-||_+``."""
    b_sum = float(np.sum(stats.sigma_minus))
    if abs(b_sum) < DEGENERATE_EPS:
        raise DegenerateFieldError(
            "neighbor-block entry sum is ~0; beta is unidentifiable"
        )
    return float(np.sum(stats.rho)) / b_sum


def sample_mean_var(config: Configuration) -> tuple[float, float]:
    """Sample mean and variance (divisor n) over all cells.

    A constant field returns variance 0.0, which downstream consumers must
    treat as degenerate (model parameters require sigma2 > 0).
    """
    if config.n_sites < 2:
        raise ValueError("need at least 2 cells")
    return float(config.cells.mean()), float(config.cells.var())


def asymptotic_variance(g1: FisherTensor, g2: FisherTensor) -> float:
    """Asymptotic variance of the beta estimate: I_bb^(1) / (I_bb^(2))^2."""
    if g2.z == 0.0:
        raise DegenerateFieldError("type-II I_betabeta is zero")
    return g1.z / (g2.z * g2.z)


def ds_squared(tensor: FisherTensor, displacement) -> float:
    """Quadratic line element of the assembled 3x3 tensor.

    ``displacement`` is the parameter-space step (d_mu, d_sigma2, d_beta).
    """
    dmu, ds2, db = displacement
    return (
        tensor.x * dmu * dmu
        + tensor.y * ds2 * ds2
        + tensor.z * db * db
        + 2.0 * tensor.w * ds2 * db
    )


_NAN_TENSOR_1 = FisherTensor(math.nan, math.nan, math.nan, math.nan, "type-1")
_NAN_TENSOR_2 = FisherTensor(math.nan, math.nan, math.nan, math.nan, "type-2")


def field_estimates(config: Configuration) -> FieldEstimates:
    """Full estimation pipeline for one snapshot.

    Estimates mu and sigma2 by sample moments, beta by maximum
    pseudo-likelihood, then evaluates both tensors, the entropy and the
    asymptotic variance at the estimated parameters. Degenerate fields
    (zero variance or vanishing neighbor-block sum) produce a flagged
    result with NaN in place of the unavailable quantities.
    """
    mu_hat, sigma2_hat = sample_mean_var(config)
    stats = patch_covariance(extract_patches(config))
    b_sum = float(np.sum(stats.sigma_minus))
    if sigma2_hat <= 0.0 or stats.degenerate or abs(b_sum) < DEGENERATE_EPS:
        return FieldEstimates(
            mu_hat=mu_hat,
            sigma2_hat=sigma2_hat,
            beta_mpl=math.nan,
            entropy=math.nan,
            g1=_NAN_TENSOR_1,
            g2=_NAN_TENSOR_2,
            upsilon_beta=math.nan,
            degenerate=True,
        )
    beta_hat = mpl_beta(stats)
    fitted = ModelParams(mu=mu_hat, sigma2=sigma2_hat, beta=beta_hat, delta=8)
    g1 = tensor_g1(fitted, stats)
    g2 = tensor_g2(fitted, stats)
    return FieldEstimates(
        mu_hat=mu_hat,
        sigma2_hat=sigma2_hat,
        beta_mpl=beta_hat,
        entropy=entropy(fitted, stats),
        g1=g1,
        g2=g2,
        upsilon_beta=asymptotic_variance(g1, g2),
        degenerate=False,
    )
