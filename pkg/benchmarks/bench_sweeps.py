"""Time one lattice sweep per backend (numpy vs numba).

Usage: python benchmarks/bench_sweeps.py [--sizes 64,128,256] [--repeats 20]

Both backends run the identical raster over pre-drawn randomness, so the
numbers differ only by execution engine. The numba timings exclude the
one-off JIT compilation (a warm-up call is made first).
"""

import argparse
import time

import numpy as np

from gmrf_infogeo import _kernels
from gmrf_infogeo.lattice import neighbor_indices, new_iid_configuration


def time_backend(kind: str, backend: str, n: int, repeats: int) -> float:
    """Best-of-``repeats`` wall time in seconds for one n x n sweep."""
    rng = np.random.default_rng(0)
    config = new_iid_configuration(n, n, 0.0, 5.0, seed=1)
    nbr = neighbor_indices(n, n)
    steps = rng.normal(0.0, 0.5, size=n * n)
    unif = rng.random(size=n * n)
    normals = rng.standard_normal(n * n)

    def run():
        cells = np.array(config.cells)
        if kind == "metropolis":
            _kernels.metropolis_raster(
                cells, nbr, 0.0, 5.0, 0.05, steps, unif, backend=backend
            )
        else:
            _kernels.gibbs_raster(cells, nbr, 0.0, 5.0, 0.05, normals, backend=backend)

    run()  # warm-up (JIT compile, caches)
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        run()
        best = min(best, time.perf_counter() - start)
    return best


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="64,128,256")
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = ["numpy"]
    if _kernels.NUMBA_AVAILABLE:
        backends.append("numba")
    else:
        print("numba is not installed; timing the numpy backend only\n")

    print(f"{'sweep':<12}{'lattice':<10}" + "".join(f"{b + ' (ms)':>14}" for b in backends) + f"{'speedup':>10}")
    for kind in ("metropolis", "gibbs"):
        for n in sizes:
            times = [time_backend(kind, b, n, args.repeats) for b in backends]
            row = f"{kind:<12}{f'{n}x{n}':<10}" + "".join(f"{t * 1e3:>14.3f}" for t in times)
            if len(times) == 2:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)


if __name__ == "__main__":
    main()
