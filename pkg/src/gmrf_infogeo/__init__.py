"""Simulation and information-geometry analysis of isotropic pairwise
Gaussian-Markov random fields on 2D toroidal lattices.

The package covers the full pipeline: MCMC dynamics driven through an
inverse-temperature schedule, maximum pseudo-likelihood estimation from
single snapshots, closed-form Fisher information tensors of both kinds,
entropy, and Fisher-curve assembly with a hysteresis (asymmetry) statistic.
"""

from .lattice import (
    Configuration,
    SiteIndex,
    extract_patches,
    neighbors,
    new_iid_configuration,
    read_snapshot,
    write_snapshot,
)
from .gmrf import (
    ModelParams,
    NaturalStatistics,
    lcdf_log_density,
    log_pseudo_likelihood,
    natural_statistics,
)
from .sampler import (
    Schedule,
    TrajectoryRecord,
    acceptance_ratio,
    gibbs_sweep,
    metropolis_sweep,
    run_schedule,
)
from .infogeo import (
    DegenerateFieldError,
    FieldEstimates,
    FisherTensor,
    PatchStats,
    asymptotic_variance,
    ds_squared,
    entropy,
    field_estimates,
    kron_sum,
    mpl_beta,
    patch_covariance,
    sample_mean_var,
    tensor_g1,
    tensor_g2,
)
from .oracle import (
    NeighborhoodModel,
    isserlis_fourth_moment,
    mc_fisher_component,
    mpl_beta_direct,
)
from .curve import (
    FisherCurve,
    build_fisher_curve,
    export_curve,
    hysteresis_gap,
)

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "SiteIndex",
    "new_iid_configuration",
    "neighbors",
    "extract_patches",
    "read_snapshot",
    "write_snapshot",
    "ModelParams",
    "NaturalStatistics",
    "lcdf_log_density",
    "natural_statistics",
    "log_pseudo_likelihood",
    "Schedule",
    "TrajectoryRecord",
    "acceptance_ratio",
    "metropolis_sweep",
    "gibbs_sweep",
    "run_schedule",
    "DegenerateFieldError",
    "PatchStats",
    "FisherTensor",
    "FieldEstimates",
    "patch_covariance",
    "kron_sum",
    "tensor_g1",
    "tensor_g2",
    "entropy",
    "mpl_beta",
    "sample_mean_var",
    "asymptotic_variance",
    "ds_squared",
    "field_estimates",
    "NeighborhoodModel",
    "mc_fisher_component",
    "isserlis_fourth_moment",
    "mpl_beta_direct",
    "FisherCurve",
    "build_fisher_curve",
    "hysteresis_gap",
    "export_curve",
    "__version__",
]
