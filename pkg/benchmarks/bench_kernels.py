#!/usr/bin/env python3
"""Benchmark the hot RK4 kernels: numba @njit vs the pure-numpy fallback.

Run with no arguments; the script re-executes itself under both settings of
BN6_NO_NUMBA and prints a side-by-side table.  The numba path pays a one-off
JIT cost (excluded below by a warmup call); the numpy fallback vectorizes
over the batch dimension, so batched sweeps fare much better than scalar
profile integrations.
"""

import json
import os
import subprocess
import sys
import time

import numpy as np

CASES = ["shoot_batch_181", "shoot_profile_4096", "eig_batch_64", "lambda0_bisection_step"]


def _measure() -> dict:
    from bn6 import kernels

    nodes = np.linspace(0.0, 1.0, 4097)
    sweep = np.geomspace(1e-3, 1e3, 181)
    mus = np.linspace(-30.0, 300.0, 64)
    q = np.full(4097, 22.5)
    qp = np.zeros(4097)

    # warmup (JIT compile on the numba path)
    kernels.shoot_mesh_final(sweep[:2], 22.469, nodes)
    kernels.shoot_mesh(11.23, 22.469, nodes)
    kernels.eig_shoot_batch(q, qp, nodes[1], 0, mus[:2])

    out = {"numba": kernels.NUMBA_ENABLED}

    t0 = time.perf_counter()
    kernels.shoot_mesh_final(sweep, 22.469, nodes)
    out["shoot_batch_181"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(10):
        kernels.shoot_mesh(11.23, 22.469, nodes)
    out["shoot_profile_4096"] = (time.perf_counter() - t0) / 10.0

    t0 = time.perf_counter()
    kernels.eig_shoot_batch(q, qp, nodes[1], 0, mus)
    out["eig_batch_64"] = time.perf_counter() - t0

    # one bisection step of the lambda0 driver: bracket sweep + 55 refinements
    t0 = time.perf_counter()
    kernels.shoot_mesh_final(sweep, 22.469, np.linspace(0.0, 1.0, 513))
    for _ in range(55):
        kernels.shoot_mesh_final(np.array([11.2]), 22.469, nodes)
    out["lambda0_bisection_step"] = time.perf_counter() - t0
    return out


def main() -> int:
    if os.environ.get("BN6_BENCH_CHILD"):
        print(json.dumps(_measure()))
        return 0
    rows = {}
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, BN6_NO_NUMBA=flag, BN6_BENCH_CHILD="1")
        proc = subprocess.run([sys.executable, __file__], env=env,
                              capture_output=True, text=True, check=True)
        rows[label] = json.loads(proc.stdout.strip().splitlines()[-1])
    print(f"{'case':26s} {'numba':>12s} {'numpy':>12s} {'speedup':>9s}")
    for case in CASES:
        tn = rows["numba"][case]
        tp = rows["numpy"][case]
        print(f"{case:26s} {tn * 1e3:10.2f}ms {tp * 1e3:10.2f}ms {tp / tn:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
