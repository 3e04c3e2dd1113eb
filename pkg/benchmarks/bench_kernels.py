"""Benchmark the compiled kernels against the NumPy fallback.

Times the three hot kernels on realistic block sizes, then a full fit with
each backend (the backend is chosen at import, so the fit comparison runs
in subprocesses with RLAR_PURE_PYTHON toggled).

Run from the repository root:  python3 benchmarks/bench_kernels.py
"""

import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

from rlar import _core_py
from rlar._kernels import HAVE_COMPILED

REPO = Path(__file__).resolve().parent.parent
FIT_SNIPPET = """
import time
from rlar.data import load_csv, normalize_min_max
from rlar.solver import HyperParams, fit
ds = normalize_min_max(load_csv({data!r}))
fit(ds, HyperParams(alpha=0.1, beta=0.1, k=3, max_iter=5))  # warm up
start = time.perf_counter()
for _ in range(5):
    fit(ds, HyperParams(alpha=0.1, beta=0.1, k=3, max_iter=30))
print((time.perf_counter() - start) / 5)
"""


def timeit(fn, *args, repeat=200):
    fn(*args)  # warm up
    start = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    return (time.perf_counter() - start) / repeat


def bench_kernels(core):
    rng = np.random.default_rng(0)
    rows = []
    for m in (10, 30, 100):
        e = rng.normal(size=(m, 3))
        rows.append((f"pairwise_norms m={m:<3}", timeit(core.pairwise_norms, e, 3.0)))
    for m in (10, 30, 100):
        g = rng.uniform(size=(m, m))
        np.fill_diagonal(g, 0.0)
        rows.append((f"knn_binary     m={m:<3}", timeit(core.knn_binary, g, 3)))
    for n, c in ((30, 3), (300, 10)):
        y = rng.uniform(-2, 2, size=(n, c))
        labels = rng.integers(0, c, size=n).astype(np.int64)
        rows.append((f"retarget_rows  n={n:<3} c={c:<2}", timeit(core.retarget_rows, y, labels)))
    return rows


def bench_fit(pure_python):
    env = dict(os.environ)
    if pure_python:
        env["RLAR_PURE_PYTHON"] = "1"
    else:
        env.pop("RLAR_PURE_PYTHON", None)
    snippet = FIT_SNIPPET.format(data=str(REPO / "data" / "iris.csv"))
    out = subprocess.run([sys.executable, "-c", snippet], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main():
    if not HAVE_COMPILED:
        print("compiled extension not built; only the NumPy fallback is available")
        return
    from rlar import _core

    fallback = dict(bench_kernels(_core_py))
    compiled = dict(bench_kernels(_core))
    print(f"{'kernel':<28} {'numpy':>10} {'compiled':>10} {'speedup':>8}")
    for name in fallback:
        ratio = fallback[name] / compiled[name]
        print(f"{name:<28} {fallback[name] * 1e6:>8.1f}us {compiled[name] * 1e6:>8.1f}us "
              f"{ratio:>7.1f}x")

    numpy_fit = bench_fit(pure_python=True)
    compiled_fit = bench_fit(pure_python=False)
    print(f"\n{'full fit, iris, 30 iters':<28} {numpy_fit * 1e3:>8.1f}ms "
          f"{compiled_fit * 1e3:>8.1f}ms {numpy_fit / compiled_fit:>7.1f}x")


if __name__ == "__main__":
    main()
