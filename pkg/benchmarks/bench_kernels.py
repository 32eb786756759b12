"""Compiled core vs NumPy fallback on the collision hot loops.

Usage: ``python3 benchmarks/bench_kernels.py [--n 12] [--rows 9] [--repeat 3]``

Times one gain evaluation, one entropy-density evaluation and the loss-weight
assembly for the A-B pair on the same grid with both backends, and reports
the largest difference between them.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from slabkin import kernels
from slabkin.collision import KernelConfig, KernelTruncation, LOG_FLOOR, Species, build_operators
from slabkin.velocity_space import VelocityGrid, species_maxwellian


def _best(fn, repeat):
    best, out = np.inf, None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=12, help="velocity nodes per axis")
    ap.add_argument("--rows", type=int, default=9, help="slab rows in the batched fields")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if not kernels.compiled_available():
        print("compiled core not built; only the fallback is available")
        return 1
    vg = VelocityGrid.for_walls(args.n, 1.0, 2.0)
    sp = {"A": Species(1.0, label="A"), "B": Species(2.0, label="B")}
    op = build_operators(vg, sp, KernelConfig(), KernelTruncation())["AB"]
    rng = np.random.default_rng(1)
    base = species_maxwellian(vg.nodes, 1.0, 1.5)
    fa = base * (1.0 + 0.2 * rng.random((args.rows, vg.size)))
    fb = base * (1.0 + 0.2 * rng.random((args.rows, vg.size)))
    pa, pb = op._pad(fa), op._pad(fb)
    rows = np.arange(vg.size, dtype=np.int64)
    print(f"grid {args.n}^3, {args.rows} slab rows, {op.n_pairs} velocity pairs")
    print(f"{'kernel':<16}{'compiled [s]':>14}{'python [s]':>14}{'speedup':>10}{'max diff':>12}")
    for name in ("gain", "entropy", "loss_weights"):
        res = {}
        for be in ("compiled", "python"):
            if name == "gain":
                def run(be=be):
                    out = np.zeros((len(rows), pa.shape[1]))
                    kernels.gain_rows(op.params, pa, pb, rows, op.row_ptr, op.cols, out, backend=be)
                    return out
            elif name == "entropy":
                def run(be=be):
                    out = np.zeros((len(rows), pa.shape[1]))
                    kernels.entropy_rows(op.params, pa, pb, rows, op.row_ptr, op.cols, out, LOG_FLOOR, backend=be)
                    return out
            else:
                def run(be=be):
                    return np.asarray(kernels.loss_weights(op.params, op.row_ptr, op.cols, backend=be))
            res[be] = _best(run, args.repeat)
        (tc, oc), (tp, op_) = res["compiled"], res["python"]
        scale = max(float(np.max(np.abs(op_))), np.finfo(float).tiny)
        diff = float(np.max(np.abs(oc - op_))) / scale
        print(f"{name:<16}{tc:>14.4f}{tp:>14.4f}{tp / tc:>10.1f}{diff:>12.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
