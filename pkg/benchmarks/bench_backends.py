"""Compiled core vs numpy fallback on the two hot kernels.

    python3 benchmarks/bench_backends.py [--repeat 3]

Both backends must return identical integers; the script checks that before
reporting timings.
"""
import argparse
import time

import numpy as np

from ragclust import _backend
from ragclust.counting import count_graph
from ragclust.model import AnnulusParams, RngSeed, sample_positions

GRAPHS = [
    AnnulusParams(10_000, 0.02, 0.005),
    AnnulusParams(50_000, 0.006, 0.002),
    AnnulusParams(20_000, 0.1, 0.02),
]
MC_SAMPLES = 2_000_000


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    names = _backend.available()
    print(f"backends: {', '.join(names)}")
    print(f"{'kernel':<42}" + "".join(f"{n:>12}" for n in names) + "   speedup")
    for p in GRAPHS:
        ps = sample_positions(p, RngSeed(1))
        row, results = [], []
        for name in names:
            t, out = best_of(lambda: count_graph(ps, p, name), args.repeat)
            row.append(t)
            results.append(out)
        assert all(r == results[0] for r in results), "backends disagree"
        label = f"count_graph n={p.n} r1={p.r1} r2={p.r2}"
        print(_line(label, row))
    u = np.random.default_rng(0).random((4, MC_SAMPLES))
    row, results = [], []
    for name in names:
        k = _backend.load(name)
        t, out = best_of(lambda: k.kernel_category_counts(u, 0.02, 0.005), args.repeat)
        row.append(t)
        results.append(out)
    assert all(np.array_equal(r, results[0]) for r in results), "backends disagree"
    print(_line(f"kernel_category_counts {MC_SAMPLES:.0e} quads", row))


def _line(label, row):
    speed = f"{row[-1] / row[0]:9.1f}x" if len(row) > 1 else ""
    return f"{label:<42}" + "".join(f"{t * 1e3:10.1f}ms" for t in row) + speed


if __name__ == "__main__":
    main()
