"""Compare the compiled kernels with the numpy fallback.

Usage: ``python benchmarks/bench_kernels.py [--states N] [--samples N] [--repeat R]``
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from nlwitness import experiment as ex
from nlwitness import kernels
from nlwitness.states import bell_basis, boundary_state, ginibre_batch, phi_alpha


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--states", type=int, default=20_000)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--sweep", action="store_true", help="also time the full default sweep")
    args = p.parse_args(argv)

    backends = ["python"] + (["compiled"] if kernels._core is not None else [])
    rhos = ginibre_batch(args.states, 4, np.random.default_rng(0))
    phi = phi_alpha(0.4).vec
    psis = np.array([b.vec for b in bell_basis()])
    center = boundary_state(np.pi / 4).mat
    ordinals = np.arange(args.samples)

    cases = {
        f"min_eigvalsh ({args.states} states)": lambda b: kernels.min_eigvalsh(rhos, backend=b),
        f"pt_stats ({args.states} states)": lambda b: kernels.pt_stats(rhos, 2, 2, phi, psis, backend=b),
        f"ball sampler ({args.samples} draws)": lambda b: kernels.sample_ball_batch(
            center, 0.2, 0, 1, 0, ordinals, 10_000, backend=b),
    }
    if args.sweep:
        cases["default sweep (41 x 10^4)"] = lambda b: ex.run_sweep(ex.SweepConfig(backend=b))

    print(f"{'kernel':<32}" + "".join(f"{b:>12}" for b in backends) + ("    speedup" if len(backends) > 1 else ""))
    for name, fn in cases.items():
        reps = 1 if name.startswith("default sweep") else args.repeat
        t = [best_of(lambda: fn(b), reps) for b in backends]
        line = f"{name:<32}" + "".join(f"{x:>11.3f}s" for x in t)
        if len(t) > 1:
            line += f"   {t[0] / t[1]:>7.2f}x"
        print(line)


if __name__ == "__main__":
    main()
