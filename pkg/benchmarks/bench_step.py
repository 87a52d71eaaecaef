"""Benchmark the compiled stencil backend against the numpy fallback.

Runs the same lossy-dielectric grid with CPML on all faces through both
backends and reports per-step time and the aggregate cell-update rate.

    python3 benchmarks/bench_step.py [--size 80 64 48] [--steps 60]
"""

import argparse
import time

import numpy as np

from suspatch import backends
from suspatch.grid import GridSpec, MaterialMap
from suspatch.ports import Waveform
from suspatch.solver import Simulation
from suspatch.validation import SoftSource


def run_backend(name, grid, materials, steps):
    sim = Simulation(grid, materials, backend=name)
    src = SoftSource("Ez", (grid.nx // 2, grid.ny // 2, grid.nz // 2),
                     Waveform(f0=5e9, f_span=2.5e9))
    sim.run(5, hooks=(src,))  # warm up
    t0 = time.perf_counter()
    sim.run(steps, hooks=(src,))
    dt = (time.perf_counter() - t0) / steps
    return dt, sim.state


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--size", type=int, nargs=3, default=(80, 64, 48))
    ap.add_argument("--steps", type=int, default=60)
    args = ap.parse_args()

    nx, ny, nz = args.size
    grid = GridSpec.make(nx, ny, nz, 1e-3, 1e-3, 1e-3, pml_thickness=10)
    rng = np.random.default_rng(0)
    materials = MaterialMap.build(grid, 1.0 + 3.0 * rng.random(grid.shape),
                                  0.01 * rng.random(grid.shape))
    cells = nx * ny * nz

    available = ["python"]
    try:
        backends.get_backend("compiled")
        available.append("compiled")
    except ImportError:
        print("compiled extension not built; benchmarking fallback only")

    results = {}
    for name in available:
        per_step, state = run_backend(name, grid, materials, args.steps)
        results[name] = (per_step, state)
        print(f"{name:9s}: {per_step * 1e3:8.2f} ms/step   "
              f"{cells / per_step / 1e6:8.1f} Mcell/s")

    if len(results) == 2:
        speedup = results["python"][0] / results["compiled"][0]
        print(f"speedup  : {speedup:8.2f}x")
        same = all(np.array_equal(a, b) for (_, a), (_, b) in
                   zip(results["python"][1].components(),
                       results["compiled"][1].components()))
        print(f"bit-identical trajectories: {same}")


if __name__ == "__main__":
    main()
