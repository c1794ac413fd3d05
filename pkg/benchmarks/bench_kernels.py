"""Compare the compiled and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py --panels 256 512 1024 --repeat 3
"""

import argparse
import time

import numpy as np

from chargedrop import _kernels_py
from chargedrop.potential import build_mesh
from chargedrop.shapes import disk, unit_square

try:
    from chargedrop import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(mesh, backend, repeat):
    idx = np.arange(mesh.n)
    s, e = mesh.starts, mesh.ends
    t_kernel = best_of(lambda: backend.kernel_block(s, e, idx, s, e, idx, mesh.n), repeat)
    pts = mesh.mids[:: max(mesh.n // 64, 1)] + 1e-3
    t_avg = best_of(lambda: backend.segment_log_average(pts, s, e), repeat)
    return t_kernel, t_avg


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--panels", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    if _kernels_c is None:
        print("compiled backend not available; build with `pip install -e . --no-build-isolation`")
    print(f"{'shape':8} {'panels':>6} {'routine':>14} {'python [s]':>11} {'cython [s]':>11} {'speedup':>8}")
    for name, P in (("square", unit_square()), ("disk", disk(128))):
        for n in args.panels:
            mesh = build_mesh(P, n)
            tp = bench(mesh, _kernels_py, args.repeat)
            tc = bench(mesh, _kernels_c, args.repeat) if _kernels_c else (float("nan"),) * 2
            for label, a, b in zip(("kernel_block", "segment_avg"), tp, tc):
                print(f"{name:8} {n:6d} {label:>14} {a:11.4f} {b:11.4f} {a / b:8.1f}")


if __name__ == "__main__":
    main()
