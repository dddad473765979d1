"""Monte Carlo check of the Lyapunov steady state.

Integrates dU = K U dt + B dW with Euler-Maruyama over an ensemble of
independent trajectories and time-averages the outer products after burn-in.
Linear dynamics with Gaussian noise carry no operator-ordering information, so
the classical stationary covariance equals the symmetrised quantum one.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .errors import NotPositiveSemidefinite, SimulationDiverged, UnstableError

logger = logging.getLogger(__name__)

DT_SAFETY = 0.05
MAX_STABILITY_PRODUCT = 0.1
DEFAULT_STEPS = 200_000
DEFAULT_TRAJECTORIES = 200
CLIP_RTOL = 1e-12
DIVERGENCE_FACTOR = 1e6


@dataclass(frozen=True)
class OracleConfig:
    """Integration budget.

    ``dt=None`` picks 0.05 / max|eig(K)|. ``n_steps=None`` takes the larger of
    200 000 and enough steps for the burn-in to span five relaxation times of
    the slowest mode.
    """

    dt: Optional[float] = None
    n_steps: Optional[int] = None
    n_trajectories: int = DEFAULT_TRAJECTORIES
    burn_in_fraction: float = 0.5
    seed: int = 0
    chunk: int = 2048
    n_bootstrap: int = 200

    def __post_init__(self):
        if self.n_trajectories < 100:
            raise ValueError("n_trajectories must be >= 100")
        if not 0.0 < self.burn_in_fraction < 1.0:
            raise ValueError("burn_in_fraction must lie in (0, 1)")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be > 0")
        if self.n_steps is not None and self.n_steps < 2:
            raise ValueError("n_steps must be >= 2")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def resolve(self, k: np.ndarray) -> tuple[float, int]:
        eig = np.linalg.eigvals(k)
        fastest = float(np.max(np.abs(eig)))
        slowest = float(np.min(np.abs(eig.real)))
        dt = self.dt if self.dt is not None else DT_SAFETY / fastest
        if dt * fastest >= MAX_STABILITY_PRODUCT:
            raise ValueError(f"dt * max|eig| = {dt * fastest:.3g} >= {MAX_STABILITY_PRODUCT}")
        if self.n_steps is not None:
            return dt, self.n_steps
        burn_time = 5.0 / slowest
        needed = int(np.ceil(burn_time / (self.burn_in_fraction * dt)))
        return dt, max(DEFAULT_STEPS, needed)


@dataclass(frozen=True)
class OracleResult:
    estimate: np.ndarray
    stderr: float
    dt: float
    n_steps: int
    per_trajectory: np.ndarray


def noise_factor(r: np.ndarray) -> np.ndarray:
    """Symmetric square root B of the diffusion matrix, B B^T = R."""
    r = np.asarray(r, dtype=float)
    w, vecs = np.linalg.eigh(0.5 * (r + r.T))
    floor = -CLIP_RTOL * np.linalg.norm(r)
    if w.min() < floor:
        raise NotPositiveSemidefinite(float(w.min()))
    w = np.clip(w, 0.0, None)
    return (vecs * np.sqrt(w)) @ vecs.T


def _trajectory_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64DXSM(np.random.SeedSequence(seed, spawn_key=(index,))))


def _run_group(k, b, dt, n_steps, burn, seed, indices, chunk):
    d = k.shape[0]
    rngs = [_trajectory_rng(seed, i) for i in indices]
    x = np.zeros((len(indices), d))
    acc = np.zeros((len(indices), d, d))
    scale = np.linalg.norm(b) * np.sqrt(dt)
    limit = DIVERGENCE_FACTOR * max(scale, np.finfo(float).tiny)
    k = np.ascontiguousarray(k)
    b = np.ascontiguousarray(b)
    done = 0
    while done < n_steps:
        m = min(chunk, n_steps - done)
        dw = np.empty((len(indices), m, d))
        for t, rng in enumerate(rngs):
            rng.standard_normal(out=dw[t])
        skip = min(max(burn - done, 0), m)
        kernels.em_advance(x, k, b, dw, dt, skip, acc)
        done += m
        worst = float(np.max(np.abs(x)))
        if not np.isfinite(worst) or worst > limit:
            raise SimulationDiverged(
                f"trajectory amplitude {worst:.3g} exceeded {limit:.3g} after {done} steps")
    return acc / (n_steps - burn)


def simulate_covariance(k: np.ndarray, b: np.ndarray, cfg: OracleConfig = OracleConfig(),
                        workers: int = 1) -> OracleResult:
    """Ensemble/time-averaged stationary covariance of dU = K U dt + B dW.

    Parameters
    ----------
    k, b : ndarray
        Drift matrix and noise factor (``b @ b.T`` is the diffusion matrix).
    cfg : OracleConfig
    workers : int
        Trajectory groups run in separate processes when > 1. The result does
        not depend on this value.

    Returns
    -------
    OracleResult
        The estimate, a bootstrap standard error of its Frobenius deviation,
        and the resolved step size and step count.
    """
    k = np.atleast_2d(np.asarray(k, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if np.max(np.linalg.eigvals(k).real) >= 0:
        raise UnstableError(float(np.max(np.linalg.eigvals(k).real)))
    dt, n_steps = cfg.resolve(k)
    burn = int(cfg.burn_in_fraction * n_steps)
    if burn >= n_steps:
        raise ValueError("burn-in leaves no samples")
    logger.info("oracle: dt=%.3g, %d steps, %d trajectories", dt, n_steps, cfg.n_trajectories)

    idx = np.arange(cfg.n_trajectories)
    if workers > 1:
        groups = np.array_split(idx, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_group, *zip(*[
                (k, b, dt, n_steps, burn, cfg.seed, g.tolist(), cfg.chunk) for g in groups])))
        per_traj = np.concatenate(parts)
    else:
        per_traj = _run_group(k, b, dt, n_steps, burn, cfg.seed, idx.tolist(), cfg.chunk)

    estimate = per_traj.mean(axis=0)
    estimate = 0.5 * (estimate + estimate.T)
    stderr = _bootstrap_stderr(per_traj, estimate, cfg)
    return OracleResult(estimate, stderr, dt, n_steps, per_traj)


def _bootstrap_stderr(per_traj, estimate, cfg):
    rng = np.random.Generator(np.random.PCG64DXSM(
        np.random.SeedSequence(cfg.seed, spawn_key=(2**63,))))
    n = per_traj.shape[0]
    devs = np.empty(cfg.n_bootstrap)
    for i in range(cfg.n_bootstrap):
        sample = per_traj[rng.integers(0, n, n)].mean(axis=0)
        devs[i] = np.linalg.norm(sample - estimate)
    return float(np.sqrt(np.mean(devs**2)))
