"""Hot-path raster-sweep kernels with interchangeable numpy/numba backends.

Both backends run the same function body over pre-drawn random arrays, so
results are bit-identical whichever one executes. The active backend is
chosen by the ``GMRF_INFOGEO_BACKEND`` environment variable (``numba`` or
``numpy``); when unset, numba is used if importable, else numpy.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised via the numpy backend
    numba = None
    NUMBA_AVAILABLE = False

_ENV_VAR = "GMRF_INFOGEO_BACKEND"


def _metropolis_raster(cells, nbr, mu, sigma2, beta, steps, unif):
    """One Metropolis sweep, visiting sites in row-major order.

    ``steps`` holds the pre-drawn random-walk proposals and ``unif`` the
    pre-drawn uniforms; ``cells`` is updated in place. Returns the number
    of accepted moves.
    """
    n = cells.shape[0]
    d = nbr.shape[1]
    inv2s2 = 0.5 / sigma2
    accepted = 0
    for i in range(n):
        s = 0.0
        for k in range(d):
            s += cells[nbr[i, k]]
        s -= d * mu  # sum of (x_j - mu) over the neighborhood
        x = cells[i]
        x_new = x + steps[i]
        e_old = (x - mu) - beta * s
        e_new = (x_new - mu) - beta * s
        diff = (e_old * e_old - e_new * e_new) * inv2s2
        if diff >= 0.0 or unif[i] < np.exp(diff):
            cells[i] = x_new
            accepted += 1
    return accepted


def _gibbs_raster(cells, nbr, mu, sigma2, beta, normals):
    """One Gibbs sweep: resample every site from its exact LCDF, row-major."""
    n = cells.shape[0]
    d = nbr.shape[1]
    sigma = np.sqrt(sigma2)
    for i in range(n):
        s = 0.0
        for k in range(d):
            s += cells[nbr[i, k]]
        s -= d * mu
        cells[i] = mu + beta * s + sigma * normals[i]
    return 0


_IMPLS = {"numpy": (_metropolis_raster, _gibbs_raster)}

if NUMBA_AVAILABLE:
    _jit = numba.njit(cache=True, nogil=True)
    _IMPLS["numba"] = (_jit(_metropolis_raster), _jit(_gibbs_raster))


def _default_backend() -> str:
    requested = os.environ.get(_ENV_VAR, "").strip().lower()
    if not requested:
        return "numba" if NUMBA_AVAILABLE else "numpy"
    if requested not in ("numba", "numpy"):
        raise ValueError(
            f"{_ENV_VAR} must be 'numba' or 'numpy', got {requested!r}"
        )
    if requested == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError(f"{_ENV_VAR}=numba but numba is not importable")
    return requested


def active_backend() -> str:
    """Name of the backend sweeps will run on ('numba' or 'numpy')."""
    return _default_backend()


def metropolis_raster(cells, nbr, mu, sigma2, beta, steps, unif, backend=None) -> int:
    impl = _IMPLS[backend or _default_backend()][0]
    return impl(cells, nbr, mu, sigma2, beta, steps, unif)


def gibbs_raster(cells, nbr, mu, sigma2, beta, normals, backend=None) -> None:
    impl = _IMPLS[backend or _default_backend()][1]
    impl(cells, nbr, mu, sigma2, beta, normals)
