"""Benchmark the compiled kernels against the pure-numpy fallback.

Times the three hot kernels in isolation and a nine-dipole sweep slice end
to end, once per available backend. Usage:

    python benchmarks/bench_kernels.py [--repeat 5] [--quick]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from dipoleswitch import SweepConfig, build_geometry, kernels, run_sweep
from dipoleswitch.hamiltonian import enumerate_sector


def best_of(repeat, fn, *args, **kwargs):
    timings = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn(*args, **kwargs)
        timings.append(time.perf_counter() - start)
    return min(timings)


def bench_fill_block(backend, repeat, n=12, k=6):
    masks = enumerate_sector(n, k)
    rng = np.random.default_rng(1)
    j_ij = rng.normal(size=(n, n))
    j_ij = (j_ij + j_ij.T) / 2.0
    np.fill_diagonal(j_ij, 0.0)
    omega = rng.uniform(0.0, 2.0, size=n)
    lookup = np.zeros(1 << n, dtype=np.int64)
    lookup[masks] = np.arange(masks.shape[0])
    return best_of(repeat, backend.fill_block, masks, j_ij, omega, lookup)


def bench_pair_rho(backend, repeat, n=10, states=256):
    rng = np.random.default_rng(2)
    vectors = rng.normal(size=(states, 1 << n))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    weights = rng.uniform(size=states)
    weights /= weights.sum()

    def run():
        for i, j in ((0, 1), (0, 5), (3, 9)):
            backend.pair_rho(vectors, weights, i, j)

    return best_of(repeat, run)


def bench_concurrence(backend, repeat, count=20000):
    rng = np.random.default_rng(3)
    g = rng.normal(size=(count, 4, 4))
    rhos = g @ np.swapaxes(g, 1, 2)
    rhos /= np.trace(rhos, axis1=1, axis2=2)[:, None, None]
    return best_of(repeat, backend.concurrence_batch, rhos)


def bench_sweep(backend_name, repeat, points=200):
    config = SweepConfig(
        geometry=build_geometry("chain", [9]),
        x_start=0.5,
        x_stop=0.5 + (points - 1) * 1e-3,
        x_step=1e-3,
        temperatures=(1e-4, 1e-1),
        pairs=((0, 1), (0, 2)),
        transition_detection=False,
    )
    backend = kernels.get_backend(backend_name)
    saved = (kernels.fill_block, kernels.pair_rho, kernels.concurrence_batch)
    kernels.fill_block = backend.fill_block
    kernels.pair_rho = backend.pair_rho
    kernels.concurrence_batch = backend.concurrence_batch
    try:
        return best_of(repeat, run_sweep, config)
    finally:
        kernels.fill_block, kernels.pair_rho, kernels.concurrence_batch = saved


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()
    repeat = 2 if args.quick else args.repeat
    sizes = dict(n=10, k=5) if args.quick else dict(n=12, k=6)
    conc_count = 4000 if args.quick else 20000
    sweep_points = 50 if args.quick else 200

    names = kernels.available_backends()
    print(f"backends: {', '.join(names)} (active: {kernels.BACKEND})")
    header = f"{'kernel':<28}" + "".join(f"{name:>12}" for name in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))

    rows = [
        (
            f"fill_block C({sizes['n']},{sizes['k']}) block",
            lambda b: bench_fill_block(b, repeat, **sizes),
        ),
        ("pair_rho 256x1024 x3", lambda b: bench_pair_rho(b, repeat)),
        (f"concurrence_batch {conc_count}", lambda b: bench_concurrence(b, repeat, conc_count)),
    ]
    for label, runner in rows:
        timings = {name: runner(kernels.get_backend(name)) for name in names}
        line = f"{label:<28}" + "".join(f"{timings[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            line += f"{timings['python'] / timings['compiled']:>9.1f}x"
        print(line)

    timings = {name: bench_sweep(name, max(1, repeat // 2), sweep_points) for name in names}
    line = f"{'sweep N=9 ' + str(sweep_points) + 'pts':<28}" + "".join(
        f"{timings[n] * 1e3:>10.0f}ms" for n in names
    )
    if len(names) == 2:
        line += f"{timings['python'] / timings['compiled']:>9.1f}x"
    print(line)


if __name__ == "__main__":
    main()
