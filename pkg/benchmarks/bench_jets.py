"""Benchmark the jet-product kernels (compiled vs pure python) and the
end-to-end curvature oracle that sits on top of them.

Usage: python3 benchmarks/bench_jets.py [--points N]
"""

import argparse
import time

import numpy as np


def bench_kernel(kernel, sp, repeats=20000):
    rng = np.random.default_rng(0)
    a = rng.uniform(-1, 1, size=sp.ncoeff)
    b = rng.uniform(-1, 1, size=sp.ncoeff)
    out = np.zeros(sp.ncoeff)
    kernel.mul_into(a, b, out, *sp.table)  # warm any caches
    start = time.perf_counter()
    for _ in range(repeats):
        out[:] = 0.0
        kernel.mul_into(a, b, out, *sp.table)
    return (time.perf_counter() - start) / repeats


def bench_curvature(points):
    from pcgeom import expr as ex
    from pcgeom import models, riemann

    m = models.build_contact_potential(
        ex.var("y1"), 2.0 * ex.var("y2"),
        f3=ex.var("x1") * ex.var("x2"),
    )
    pts = m.sample_points(points, seed=0)
    start = time.perf_counter()
    for pt in pts:
        riemann.curvature_at(m, pt, 3)
    return (time.perf_counter() - start) / len(pts)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--points", type=int, default=40)
    args = ap.parse_args()

    from pcgeom import _jetcore_py
    from pcgeom import jets

    try:
        from pcgeom import _jetcore

        compiled = _jetcore
    except ImportError:
        compiled = None

    print(f"active kernel: {jets.BACKEND}")
    for n, order in ((5, 3), (5, 2), (3, 3)):
        sp = jets.space(n, order)
        t_py = bench_kernel(_jetcore_py, sp)
        line = (f"jet product n={n} order={order} "
                f"({sp.ncoeff:3d} coeffs, {len(sp.table[0]):4d} terms): "
                f"python {t_py * 1e6:8.2f} us")
        if compiled is not None:
            t_c = bench_kernel(compiled, sp)
            line += f"   compiled {t_c * 1e6:8.2f} us   speedup {t_py / t_c:5.1f}x"
        print(line)

    t = bench_curvature(args.points)
    print(f"curvature oracle (order 3, dim 5): {t * 1e3:.2f} ms/point "
          f"[{jets.BACKEND} kernel]")


if __name__ == "__main__":
    main()
