"""Compare the compiled and pure-Python Wigner backends.

Each workload starts from empty memo tables so the kernels themselves are
timed, then again with warm tables to show what callers actually pay.

    python3 benchmarks/bench_kernels.py --repeat 3
"""
import argparse
import itertools
import time

import numpy as np

from faraday_noise import scatter, wigner
from faraday_noise.atom import builtin_cesium_d2
from faraday_noise.polarizability import tensor_coeffs


def all_3j(jmax2):
    n = 0
    for tj1, tj2 in itertools.product(range(jmax2 + 1), repeat=2):
        for tj3 in range(abs(tj1 - tj2), min(tj1 + tj2, jmax2) + 1, 2):
            for tm1 in range(-tj1, tj1 + 1, 2):
                for tm2 in range(-tj2, tj2 + 1, 2):
                    wigner.threej2(tj1, tj2, tj3, tm1, tm2, -tm1 - tm2)
                    n += 1
    return n


def all_6j(jmax2):
    n = 0
    for args in itertools.product(range(jmax2 + 1), repeat=6):
        wigner.sixj2(*args)
        n += 1
    return n


def cold_scatter():
    scatter._engine.cache_clear()
    scatter._weights.cache_clear()
    return scatter.assemble(builtin_cesium_d2(), 4, -700.0)


def coeff_grid():
    cs = builtin_cesium_d2()
    for det in -np.logspace(np.log10(600), 5, 50):
        tensor_coeffs(cs, 4, det)
        scatter.assemble(cs, 4, det)


WORKLOADS = [
    ("3j, j <= 5, all m", lambda: all_3j(10)),
    ("6j, all args <= 5/2", lambda: all_6j(5)),
    ("scatter weights, Cs F=4 (cold)", cold_scatter),
    ("50-point A/B/C grid", coeff_grid),
]


def run(backend, repeat):
    wigner.use_backend(backend)
    rows = []
    for name, fn in WORKLOADS:
        cold, warm = [], []
        for _ in range(repeat):
            wigner.clear_cache()
            scatter._engine.cache_clear()
            scatter._weights.cache_clear()
            t0 = time.perf_counter()
            fn()
            cold.append(time.perf_counter() - t0)
            t0 = time.perf_counter()
            fn()
            warm.append(time.perf_counter() - t0)
        rows.append((name, min(cold), min(warm)))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    backends = wigner.available_backends()
    results = {b: run(b, args.repeat) for b in backends}
    wigner.use_backend(backends[0])
    print(f"{'workload':34s}" + "".join(f"{b + ' cold':>14s}{b + ' warm':>14s}" for b in backends))
    for i, (name, _, _) in enumerate(results[backends[0]]):
        line = f"{name:34s}"
        for b in backends:
            _, cold, warm = results[b][i]
            line += f"{cold * 1e3:12.2f}ms{warm * 1e3:12.2f}ms"
        print(line)
    if len(backends) == 2:
        for i, (name, _, _) in enumerate(results["cython"]):
            ratio = results["python"][i][1] / results["cython"][i][1]
            print(f"cold speedup {name}: {ratio:.1f}x")


if __name__ == "__main__":
    main()
