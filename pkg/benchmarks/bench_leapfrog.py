"""Compiled versus numpy leapfrog on the default grid.

    python3 benchmarks/bench_leapfrog.py [--amplitude 10] [--steps 2000] [--repeat 3]

Both backends advance the same state; the script reports the best wall time
per backend, the speed-up and the largest difference between the results.
"""

import argparse
import time

import numpy as np

from aai.oracle import GridSpec, init_gaussian_packet, potential_on_grid
from aai.oracle.backend import BACKENDS
from aai.units import PhaseSpacePoint, PowerLawPerturbation


def run(backend, re, im, pot, kin, dt, steps, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        r, i = re.copy(), im.copy()
        start = time.perf_counter()
        BACKENDS[backend](r, i, pot, kin, dt, steps)
        best = min(best, time.perf_counter() - start)
        out = r + 1j * i
    return best, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--amplitude", type=float, default=10.0)
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    grid = GridSpec.default(args.amplitude)
    psi = init_gaussian_packet(PhaseSpacePoint(0.0, args.amplitude), grid=grid).psi
    pot = potential_on_grid(grid, PowerLawPerturbation(3, 0.005))
    dt = 0.5 * grid.stable_dt(pot)
    re = np.ascontiguousarray(psi.real)
    im = np.ascontiguousarray(psi.imag)

    print(f"grid points {grid.n_points}, stencil order {grid.stencil_order}, steps {args.steps}")
    results = {}
    for name in sorted(BACKENDS):
        seconds, out = run(name, re, im, pot, grid.kinetic_stencil, dt, args.steps, args.repeat)
        results[name] = (seconds, out)
        rate = grid.n_points * args.steps / seconds / 1e6
        print(f"{name:>7}: {seconds * 1e3:9.1f} ms  ({rate:6.1f} Mpoint-steps/s)")
    if "cython" in results:
        py, cy = results["python"], results["cython"]
        print(f"speed-up {py[0] / cy[0]:.2f}x, max |difference| {np.max(np.abs(py[1] - cy[1])):.2e}")
    else:
        print("compiled kernel not built; only the numpy fallback was timed")


if __name__ == "__main__":
    main()
