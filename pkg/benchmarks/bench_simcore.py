"""Time the compiled and pure-Python Euler kernels on the same input.

    python3 benchmarks/bench_simcore.py [--steps N] [--repeat R]

Both kernels receive identical normals, so the final states must agree
bit for bit; the script checks that before reporting timings.
"""

import argparse
import time

import numpy as np

from srbm_wedge import get_simcore, simcore_backend
from srbm_wedge.fixtures import get
from srbm_wedge.oracle import _sqrt_sigma


def run(core, z0, normals, dt, F, mu, R):
    z = z0.copy()
    out = np.empty_like(normals)
    t = time.perf_counter()
    passes = core.euler_block(z, normals, dt, F, mu, R, out)
    return time.perf_counter() - t, z, out, passes


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    q = get("gamma_half").model(drift=0.2)
    F = np.ascontiguousarray(_sqrt_sigma(q))
    mu = np.array([q.mu1, q.mu2])
    R = np.array([[q.r11, q.r12], [q.r21, q.r22]])
    normals = np.random.default_rng(7).standard_normal((args.steps, 2))
    z0 = np.zeros(2)
    dt = 1e-3

    if simcore_backend() != "cython":
        print("compiled kernel not available; only the Python kernel is timed")
        backends = ["python"]
    else:
        backends = ["cython", "python"]

    best, finals = {}, {}
    for name in backends:
        core = get_simcore(name)
        times = []
        for _ in range(args.repeat):
            dtime, z, out, passes = run(core, z0, normals, dt, F, mu, R)
            times.append(dtime)
        best[name] = min(times)
        finals[name] = (z, out, passes)

    if len(backends) == 2:
        zc, oc, pc = finals["cython"]
        zp, op, pp = finals["python"]
        if not (np.array_equal(zc, zp) and np.array_equal(oc, op) and pc == pp):
            raise SystemExit("kernels disagree")

    for name in backends:
        rate = args.steps / best[name]
        print(f"{name:7s} {best[name] * 1e3:9.2f} ms  {rate / 1e6:8.3f} Msteps/s")
    if len(backends) == 2:
        print(f"speedup {best['python'] / best['cython']:.1f}x")


if __name__ == "__main__":
    main()
