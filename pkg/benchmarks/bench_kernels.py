#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the numpy fallback.

The three kernels are the per-step hot path of the explicit convection
application.  Usage: python benchmarks/bench_kernels.py [n] [degree]
"""

import sys
import time

import numpy as np

from cipflow import _kernels_numpy
from cipflow.mesh import build_structured_mesh, make_periodic_x
from cipflow.space import build_space

try:
    from cipflow import _kernels
except ImportError:
    _kernels = None


def bench(label, fn, args, repeat=20):
    fn(*args)  # warm up
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn(*args)
    dt = (time.perf_counter() - t0) / repeat
    print(f"  {label:10s} {dt * 1e3:8.3f} ms")
    return dt


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 64
    degree = int(sys.argv[2]) if len(sys.argv) > 2 else 2
    mesh = make_periodic_x(build_structured_mesh(n, n))
    v = build_space(mesh, degree, 2)
    tab = v.elem_tables()
    ft = v.interior_face_tables()
    bt = v.boundary_face_tables()
    rng = np.random.RandomState(0)
    uc = rng.randn(v.ndof_scalar)
    u1 = rng.randn(v.ndof_scalar)
    sw = tab.wts[None, :] * tab.detJ[:, None]
    beta = rng.randn(*tab.phys.shape)
    coef = np.abs(rng.randn(len(ft.h), len(ft.wts)))
    wb = np.abs(rng.randn(len(bt.h), len(bt.wts)))

    backends = [("python", _kernels_numpy)]
    if _kernels is not None:
        backends.append(("compiled", _kernels))
    else:
        print("compiled kernels not built; showing the fallback only")

    print(f"mesh {n}x{n}, degree {degree}: {len(mesh.triangles)} triangles, "
          f"{len(ft.h)} interior faces, {v.ndof} velocity dofs")
    results = {}
    for label, impl in backends:
        print(f"{label}:")
        out = np.zeros(v.ndof_scalar)
        tv = bench("volume", impl.conv_volume,
                   (out, uc, v.cell_dofs, tab.N, tab.grad, sw, beta))
        tf = bench("face_jump", impl.face_jump,
                   (out, uc, ft.left.dofs, ft.right.dofs, ft.left.grad,
                    ft.right.grad, coef))
        o1 = np.zeros(v.ndof_scalar)
        tb = bench("boundary", impl.boundary_normal,
                   (out, o1, uc, u1, bt.side.dofs, bt.side.val, bt.normal, wb))
        results[label] = tv + tf + tb
        print(f"  {'total':10s} {results[label] * 1e3:8.3f} ms")
    if len(results) == 2:
        print(f"speedup compiled vs python: "
              f"{results['python'] / results['compiled']:.2f}x")


if __name__ == "__main__":
    main()
