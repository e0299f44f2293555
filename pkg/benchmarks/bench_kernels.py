"""Compare the numba and numpy kernel paths.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel is run once to trigger compilation, then timed; the table lists
the best of N runs per path.
"""

import argparse
import time

import numpy as np

from gptlab import kernels
from gptlab.core import direct_sum, simplex
from gptlab.fixtures import pentagon, prism
from gptlab.polygon import polygon_theory


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def gauss_case(n, seed=0):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n, n))
    b = rng.normal(size=n)
    return lambda f: f(A, b, 1e-12)


def simplex_case(m, n, seed=0):
    rng = np.random.default_rng(seed)
    A = np.abs(rng.normal(size=(m, n))) + 0.1
    b = np.abs(rng.normal(size=m)) + 1
    c = rng.normal(size=n)
    T0 = np.zeros((m + 1, n + m + 1))
    T0[:m, :n] = A
    T0[:m, n:n + m] = np.eye(m)
    T0[:m, -1] = b
    T0[m, :n] = c
    basis0 = np.arange(n, n + m, dtype=np.int64)
    return lambda f: f(T0.copy(), basis0.copy(), n + m, 1e-10, 100000, 50)


def facet_case(space):
    P = space.extreme_points
    G = -np.ascontiguousarray(P)
    h = np.zeros(len(P))
    E = space.barycenter.reshape(1, -1).copy()
    return lambda f: f(G, h, E, np.ones(1), 1e-9)


def effect_case(space):
    P = np.ascontiguousarray(space.extreme_points)
    G = np.vstack([P, -P])
    h = np.concatenate([np.ones(len(P)), np.zeros(len(P))])
    return lambda f: f(G, h, np.zeros((0, space.dim)), np.zeros(0), 1e-9)


CASES = [
    ("gauss 10x10", gauss_case(10), kernels.gauss_solve_nb, kernels.gauss_solve_np),
    ("gauss 60x60", gauss_case(60), kernels.gauss_solve_nb, kernels.gauss_solve_np),
    ("simplex 30x60", simplex_case(30, 60), kernels.simplex_loop_nb, kernels.simplex_loop_np),
    ("simplex 120x240", simplex_case(120, 240), kernels.simplex_loop_nb, kernels.simplex_loop_np),
    ("facets prism", facet_case(prism()), kernels.enumerate_vertices_nb, kernels.enumerate_vertices_np),
    ("facets pentagon+pentagon", facet_case(direct_sum([pentagon(), pentagon()])),
     kernels.enumerate_vertices_nb, kernels.enumerate_vertices_np),
    ("effects polygon12", effect_case(polygon_theory(12).space),
     kernels.enumerate_vertices_nb, kernels.enumerate_vertices_np),
    ("effects simplex6", effect_case(simplex(6)), kernels.enumerate_vertices_nb, kernels.enumerate_vertices_np),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<28}{'numba [ms]':>12}{'numpy [ms]':>12}{'speedup':>10}")
    for name, case, nb, npf in CASES:
        t_nb = best_of(lambda: case(nb), args.repeat)
        t_np = best_of(lambda: case(npf), args.repeat)
        print(f"{name:<28}{1e3 * t_nb:>12.3f}{1e3 * t_np:>12.3f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
