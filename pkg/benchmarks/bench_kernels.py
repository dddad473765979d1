"""Compare the numba and pure-numpy kernels on the reference drift matrix.

Run with ``python3 benchmarks/bench_kernels.py``. Needs numba installed; the
numpy forms are timed in the same process, so the result does not depend on
``CELSTEER_DISABLE_NUMBA``.
"""
import argparse
import time

import numpy as np
from numba import njit

from celsteer import kernels
from celsteer.dynamics import build_diffusion, build_drift
from celsteer.oracle import noise_factor
from celsteer.params import reference_defaults


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--traj", type=int, default=200)
    ap.add_argument("--steps", type=int, default=2048)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    params = reference_defaults(omega_over_gamma=0.0)
    k = build_drift(params)
    b = noise_factor(build_diffusion(params))
    dt = 0.05 / np.max(np.abs(np.linalg.eigvals(k)))
    dw = np.random.default_rng(1).standard_normal((args.traj, args.steps, 8))

    em_jit = njit(cache=True)(kernels._em_advance_loop)
    fl_jit = njit(cache=True)(kernels._faddeev_leverrier_py)

    def em(fn):
        def run():
            x = np.zeros((args.traj, 8))
            acc = np.zeros((args.traj, 8, 8))
            fn(x, k, b, dw, dt, args.steps // 2, acc)
            return acc
        return run

    # warm up the compiler and check that both forms agree
    a_jit, a_np = em(em_jit)(), em(kernels._em_advance_vec)()
    rel = np.linalg.norm(a_jit - a_np) / np.linalg.norm(a_np)
    print(f"EM kernel relative mismatch: {rel:.2e}")
    fl_jit(k)

    t_np = best_of(em(kernels._em_advance_vec), args.repeat)
    t_jit = best_of(em(em_jit), args.repeat)
    steps = args.traj * args.steps
    print(f"EM advance, {args.traj} traj x {args.steps} steps:")
    print(f"  numpy  {t_np * 1e3:8.1f} ms  ({steps / t_np / 1e6:6.2f} Msteps/s)")
    print(f"  numba  {t_jit * 1e3:8.1f} ms  ({steps / t_jit / 1e6:6.2f} Msteps/s)  "
          f"x{t_np / t_jit:.1f}")

    n = 2000
    t_np = best_of(lambda: [kernels._faddeev_leverrier_py(k) for _ in range(n)], args.repeat)
    t_jit = best_of(lambda: [fl_jit(k) for _ in range(n)], args.repeat)
    print(f"Faddeev-LeVerrier 8x8, {n} calls:")
    print(f"  numpy  {t_np * 1e6 / n:8.2f} us/call")
    print(f"  numba  {t_jit * 1e6 / n:8.2f} us/call  x{t_np / t_jit:.1f}")


if __name__ == "__main__":
    main()
