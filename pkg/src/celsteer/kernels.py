"""Hot numeric kernels.

Each kernel has a loop form that numba compiles and, where the loop form is
too slow to run interpreted, a vectorised numpy form. The public names
(`faddeev_leverrier`, `hurwitz_minors`, `em_advance`) are bound to whichever
backend `celsteer._accel` selected at import time. Both forms stay importable
so the benchmark can compare them in one process.
"""
import numpy as np

from ._accel import HAVE_NUMBA, njit


def _faddeev_leverrier_py(k):
    n = k.shape[0]
    coeffs = np.zeros(n + 1)
    coeffs[0] = 1.0
    ident = np.eye(n)
    m = np.zeros((n, n))
    for j in range(1, n + 1):
        m = k @ m + coeffs[j - 1] * ident
        coeffs[j] = -np.trace(k @ m) / j
    return coeffs


def _hurwitz_minors_py(a):
    n = a.shape[0] - 1
    h = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            idx = 2 * (j + 1) - (i + 1)
            if 0 <= idx <= n:
                h[i, j] = a[idx]
    out = np.empty(n)
    for m in range(1, n + 1):
        out[m - 1] = np.linalg.det(h[:m, :m].copy())
    return out


def _em_advance_loop(x, drift, noise_factor, dw, dt, skip, acc):
    ntraj, nsteps, d = dw.shape
    sq = np.sqrt(dt)
    xn = np.empty(d)
    for t in range(ntraj):
        for s in range(nsteps):
            for i in range(d):
                v = 0.0
                w = 0.0
                for j in range(d):
                    v += drift[i, j] * x[t, j]
                    w += noise_factor[i, j] * dw[t, s, j]
                xn[i] = x[t, i] + dt * v + sq * w
            for i in range(d):
                x[t, i] = xn[i]
            if s >= skip:
                for i in range(d):
                    for j in range(d):
                        acc[t, i, j] += xn[i] * xn[j]


def _em_advance_vec(x, drift, noise_factor, dw, dt, skip, acc):
    sq = np.sqrt(dt)
    step = np.eye(drift.shape[0]) + dt * drift
    kicks = sq * (dw @ noise_factor.T)
    for s in range(dw.shape[1]):
        x[:] = x @ step.T + kicks[:, s, :]
        if s >= skip:
            acc += x[:, :, None] * x[:, None, :]


if HAVE_NUMBA:
    faddeev_leverrier = njit(cache=True)(_faddeev_leverrier_py)
    hurwitz_minors = njit(cache=True)(_hurwitz_minors_py)
    em_advance = njit(cache=True)(_em_advance_loop)
else:
    faddeev_leverrier = _faddeev_leverrier_py
    hurwitz_minors = _hurwitz_minors_py
    em_advance = _em_advance_vec
