"""MCMC dynamics: Metropolis-Hastings and Gibbs sweeps, and the
inverse-temperature schedule driver.

A sweep visits every site once in row-major order. The Metropolis proposal
is a symmetric Gaussian random walk, so the acceptance probability is
min{1, P} with P the ratio of local conditional densities at the proposed
and current values. All per-sweep randomness is pre-drawn from a numpy
Generator and consumed by the raster kernel, which makes runs bit-identical
across the numba and numpy backends.

``run_schedule`` drives a chain through a beta schedule, re-estimating the
model from the lattice after every step: the sample mean and variance feed
back into the sampler parameters, and the recorded tensors/entropy are
evaluated at the fitted (mu_hat, sigma2_hat, beta_mpl).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .gmrf import ModelParams, lcdf_log_density
from .infogeo import FisherTensor, field_estimates
from .lattice import Configuration, neighbor_indices, write_snapshot

MODES = ("up", "down", "up-then-down")
SAMPLERS = ("metropolis", "gibbs")


@dataclass(frozen=True)
class Schedule:
    """A linear beta schedule with fixed increments.

    Each leg has ``round((beta_max - beta_min) / delta_beta)`` steps unless
    ``steps_per_leg`` overrides the count (needed for constant-beta null
    schedules, where the arithmetic gives zero steps). Step values are
    clipped to [beta_min, beta_max], so a null schedule records beta_min at
    every step.
    """

    beta_min: float
    beta_max: float
    delta_beta: float
    mode: str
    steps_per_leg: int | None = None

    def __post_init__(self) -> None:
        if self.beta_min > self.beta_max:
            raise ValueError("beta_min must not exceed beta_max")
        if not self.delta_beta > 0:
            raise ValueError("delta_beta must be positive")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.steps_per_leg is not None and self.steps_per_leg < 1:
            raise ValueError("steps_per_leg must be positive when given")

    @property
    def leg_steps(self) -> int:
        if self.steps_per_leg is not None:
            return self.steps_per_leg
        return int(round((self.beta_max - self.beta_min) / self.delta_beta))

    @property
    def n_steps(self) -> int:
        return self.leg_steps * (2 if self.mode == "up-then-down" else 1)

    def betas(self) -> list[float]:
        """The per-step target beta values, in order."""
        m = self.leg_steps
        up = [min(self.beta_min + i * self.delta_beta, self.beta_max) for i in range(1, m + 1)]
        down = [max(self.beta_max - i * self.delta_beta, self.beta_min) for i in range(1, m + 1)]
        if self.mode == "up":
            return up
        if self.mode == "down":
            return down
        return up + down


@dataclass(frozen=True)
class TrajectoryRecord:
    """One schedule step's full measurement row."""

    iteration: int
    beta_set: float
    mu_hat: float
    sigma2_hat: float
    beta_mpl: float
    entropy: float
    g1: FisherTensor
    g2: FisherTensor
    upsilon_beta: float
    acceptance_rate: float
    degenerate: bool = False


def acceptance_ratio(x_old: float, x_new: float, neighbor_values, params: ModelParams) -> float:
    """LCDF ratio p(x_new | eta) / p(x_old | eta), the Metropolis P."""
    diff = lcdf_log_density(x_new, neighbor_values, params) - lcdf_log_density(
        x_old, neighbor_values, params
    )
    try:
        return math.exp(diff)
    except OverflowError:
        return math.inf


def metropolis_sweep(
    config: Configuration,
    params: ModelParams,
    proposal_std: float,
    rng,
) -> tuple[Configuration, float]:
    """One Metropolis-Hastings sweep; returns (new config, acceptance rate).

    Proposes x + N(0, proposal_std^2) at every site, row-major, accepting
    with probability min{1, P}. Deterministic for a fixed Generator state.
    """
    if not proposal_std > 0:
        raise ValueError(f"proposal_std must be positive, got {proposal_std}")
    rng = np.random.default_rng(rng)
    cells = np.array(config.cells)
    nbr = neighbor_indices(config.rows, config.cols)
    steps = rng.normal(0.0, proposal_std, size=cells.size)
    unif = rng.random(size=cells.size)
    accepted = _kernels.metropolis_raster(
        cells, nbr, params.mu, params.sigma2, params.beta, steps, unif
    )
    return Configuration(config.rows, config.cols, cells), accepted / cells.size


def gibbs_sweep(config: Configuration, params: ModelParams, rng) -> Configuration:
    """One Gibbs sweep: every site resampled from its exact LCDF, row-major."""
    rng = np.random.default_rng(rng)
    cells = np.array(config.cells)
    nbr = neighbor_indices(config.rows, config.cols)
    normals = rng.standard_normal(cells.size)
    _kernels.gibbs_raster(cells, nbr, params.mu, params.sigma2, params.beta, normals)
    return Configuration(config.rows, config.cols, cells)


def run_schedule(
    schedule: Schedule,
    initial_config: Configuration,
    initial_params: ModelParams,
    sampler_choice: str = "metropolis",
    sweeps_per_step: int = 1,
    seed=0,
    *,
    proposal_std: float | None = None,
    dump_dir=None,
) -> list[TrajectoryRecord]:
    """Drive a chain through the schedule, one record per beta step.

    At each step the sampler runs ``sweeps_per_step`` sweeps at the step's
    beta, then the model is re-estimated from the lattice; mu_hat and
    sigma2_hat feed back into the sampler parameters for the next step.
    ``proposal_std`` of None means the adaptive default sqrt(sigma2_hat).
    Degenerate estimation states are recorded as flagged rows, not aborts.
    When ``dump_dir`` is given, every step's configuration is written there
    as ``step_<iteration>.snap``.
    """
    if sampler_choice not in SAMPLERS:
        raise ValueError(f"sampler must be one of {SAMPLERS}, got {sampler_choice!r}")
    if sweeps_per_step < 1:
        raise ValueError("sweeps_per_step must be positive")
    rng = np.random.default_rng(seed)
    config = initial_config
    params = initial_params
    records: list[TrajectoryRecord] = []
    for iteration, beta in enumerate(schedule.betas(), start=1):
        params = replace(params, beta=beta)
        rate = 1.0
        if sampler_choice == "metropolis":
            rates = []
            for _ in range(sweeps_per_step):
                std = math.sqrt(params.sigma2) if proposal_std is None else proposal_std
                config, swept_rate = metropolis_sweep(config, params, std, rng)
                rates.append(swept_rate)
            rate = float(np.mean(rates))
        else:
            for _ in range(sweeps_per_step):
                config = gibbs_sweep(config, params, rng)
        est = field_estimates(config)
        records.append(
            TrajectoryRecord(
                iteration=iteration,
                beta_set=beta,
                mu_hat=est.mu_hat,
                sigma2_hat=est.sigma2_hat,
                beta_mpl=est.beta_mpl,
                entropy=est.entropy,
                g1=est.g1,
                g2=est.g2,
                upsilon_beta=est.upsilon_beta,
                acceptance_rate=rate,
                degenerate=est.degenerate,
            )
        )
        if not est.degenerate:
            params = replace(params, mu=est.mu_hat, sigma2=est.sigma2_hat)
        if dump_dir is not None:
            write_snapshot(
                config, os.path.join(dump_dir, f"step_{iteration}.snap"), beta
            )
    return records
