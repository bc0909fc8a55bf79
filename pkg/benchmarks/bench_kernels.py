"""Time the numba and numpy kernel backends on sparse count data.

    python3 benchmarks/bench_kernels.py --rows 2000 --dim 500 --density 0.02

Each kernel runs once untimed (numba compilation), then ``--repeat`` times;
the best time is reported.  Both backends must return the same answer.
"""

import argparse
import time

import numpy as np
from scipy import sparse

from imbtext import _accel
from imbtext.kernels import knn_search, pairwise_sqdist, pegasos_epoch


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--rows", type=int, default=2000)
    p.add_argument("--dim", type=int, default=500)
    p.add_argument("--density", type=float, default=0.02)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    X = sparse.random(args.rows, args.dim, density=args.density, random_state=args.seed, format="csr",
                      data_rvs=lambda n: rng.integers(1, 4, n).astype(float))
    ids = np.arange(args.rows)
    Y = np.where(rng.random((args.rows, 4)) < 0.3, 1.0, -1.0)
    order = rng.permutation(args.rows)
    backends = ["numpy"] + (["numba"] if _accel.HAS_NUMBA else [])

    jobs = {
        "pairwise_sqdist": lambda b: pairwise_sqdist(X, X, b),
        "knn_search": lambda b: knn_search(X, ids, X, ids, args.k, b),
        "pegasos_epoch": lambda b: pegasos_epoch(X, Y, 1e-4, order, np.zeros((4, args.dim + 1)), 0, b)[0],
    }
    print(f"rows={args.rows} dim={args.dim} density={args.density} nnz={X.nnz}")
    print(f"{'kernel':<16}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, job in jobs.items():
        results = {b: best_of(lambda: job(b), args.repeat) for b in backends}
        line = f"{name:<16}" + "".join(f"{results[b][0]:>11.4f}s" for b in backends)
        if len(backends) > 1:
            a, b = results["numpy"][1], results["numba"][1]
            same = np.array_equal(a, b) if name != "pegasos_epoch" else np.allclose(a, b, rtol=1e-9, atol=1e-12)
            line += f"{results['numpy'][0] / results['numba'][0]:>11.1f}x" + ("" if same else "  MISMATCH")
        print(line)


if __name__ == "__main__":
    main()
