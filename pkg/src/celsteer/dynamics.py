"""Linearised fluctuation dynamics: drift and diffusion matrices, the steady-state
Lyapunov solve, and two independent stability tests.

Quadrature order is (q_m1, p_m1, q_m2, p_m2, q_c1, p_c1, q_c2, p_c2).
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg

from . import kernels
from .errors import NotPositiveSemidefinite, NumericalError, UnstableError
from .exact import char_poly_exact, hurwitz_determinants_exact
from .gain import XiCoefficients, compute_xi, effective_coupling
from .params import SystemParams

logger = logging.getLogger(__name__)

DIM = 8
PSD_RTOL = 1e-12
LYAPUNOV_RTOL = 1e-10
MARGINAL_RTOL = 1e-9


class Couplings(NamedTuple):
    g1: float
    g2: float


def couplings(params: SystemParams, xi: XiCoefficients) -> Couplings:
    return Couplings(
        effective_coupling(params.cavity_1, params.mirror_1, xi, 1),
        effective_coupling(params.cavity_2, params.mirror_2, xi, 2),
    )


def effective_linewidths(params: SystemParams, xi: XiCoefficients) -> tuple[float, float]:
    """kappa_bar_j = kappa_j + (-1)^j xi_jj: cavity 1 is narrowed by gain, cavity 2 broadened."""
    return params.cavity_1.kappa - xi.xi11, params.cavity_2.kappa + xi.xi22


def build_drift(params: SystemParams, xi: XiCoefficients | None = None,
                g: Couplings | None = None) -> np.ndarray:
    """Drift matrix K of d/dt U = K U + N at the anti-Stokes operating point."""
    if xi is None:
        xi = compute_xi(params.gain)
    if g is None:
        g = couplings(params, xi)
    kb1, kb2 = effective_linewidths(params, xi)
    gm1 = params.mirror_1.gamma_m
    gm2 = params.mirror_2.gamma_m

    k = np.zeros((DIM, DIM))
    k[np.diag_indices(DIM)] = (-gm1, -gm1, -gm2, -gm2, -kb1, -kb1, -kb2, -kb2)
    # mirror <- cavity (beam-splitter)
    k[0, 5] = -g.g1
    k[1, 4] = g.g1
    k[2, 7] = -g.g2
    k[3, 6] = g.g2
    # cavity <- mirror
    k[4, 1] = -g.g1
    k[5, 0] = g.g1
    k[6, 3] = -g.g2
    k[7, 2] = g.g2
    # laser-mediated cavity cross coupling
    k[4, 6] = xi.xi12
    k[5, 7] = -xi.xi12
    k[6, 4] = -xi.xi21
    k[7, 5] = xi.xi21
    return k


def build_diffusion(params: SystemParams, xi: XiCoefficients | None = None,
                    strict: bool = False) -> np.ndarray:
    """Symmetrised noise-correlation matrix R = R_m (+) R_c.

    Parameters
    ----------
    strict : bool
        Raise `NotPositiveSemidefinite` instead of logging a warning when R has
        an eigenvalue below ``-1e-12 * ||R||``.
    """
    if xi is None:
        xi = compute_xi(params.gain)
    m1 = params.mirror_1
    m2 = params.mirror_2
    d1 = m1.gamma_m * (2.0 * m1.occupation + 1.0)
    d2 = m2.gamma_m * (2.0 * m2.occupation + 1.0)
    c1 = params.cavity_1.kappa + xi.xi11
    c2 = params.cavity_2.kappa + xi.xi22
    half = 0.5 * (xi.xi12 + xi.xi21)

    r = np.zeros((DIM, DIM))
    r[np.diag_indices(DIM)] = (d1, d1, d2, d2, c1, c1, c2, c2)
    r[4, 6] = r[6, 4] = -half
    r[5, 7] = r[7, 5] = half

    min_eig = diffusion_min_eig(r)
    if min_eig < -PSD_RTOL * np.linalg.norm(r):
        if strict:
            raise NotPositiveSemidefinite(min_eig)
        logger.warning("diffusion matrix not PSD (min eig %.3g); white-noise reading breaks down",
                       min_eig)
    return r


def diffusion_min_eig(r: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(r)[0])


def is_psd(r: np.ndarray, rtol: float = PSD_RTOL) -> bool:
    return diffusion_min_eig(r) >= -rtol * np.linalg.norm(r)


def eigen_stability(k: np.ndarray) -> tuple[float, bool]:
    """Largest eigenvalue real part of `k` and whether it is strictly negative."""
    try:
        eig = np.linalg.eigvals(k)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigenvalue solver failed: {exc}") from exc
    if not np.all(np.isfinite(eig)):
        raise NumericalError("eigenvalue solver returned non-finite values")
    max_re = float(np.max(eig.real))
    return max_re, max_re < 0.0


def lyapunov_residual(k: np.ndarray, v: np.ndarray, r: np.ndarray) -> float:
    """Relative residual ||K V + V K^T + R||_F / ||R||_F."""
    res = k @ v + v @ k.T + r
    return float(np.linalg.norm(res) / np.linalg.norm(r))


def solve_lyapunov(k: np.ndarray, r: np.ndarray, check_stability: bool = True) -> np.ndarray:
    """Steady-state covariance V solving K V + V K^T = -R (Bartels-Stewart).

    Raises
    ------
    UnstableError
        `k` has an eigenvalue with non-negative real part; no steady state.
    NumericalError
        The solver failed or the residual is far outside tolerance.
    """
    if check_stability:
        max_re, stable = eigen_stability(k)
        if not stable:
            raise UnstableError(max_re)
    try:
        v = scipy.linalg.solve_continuous_lyapunov(k, -r)
        v = 0.5 * (v + v.T)
        res = lyapunov_residual(k, v, r)
        if res > LYAPUNOV_RTOL:
            # one step of iterative refinement on the residual
            corr = scipy.linalg.solve_continuous_lyapunov(k, -(k @ v + v @ k.T + r))
            v = v + 0.5 * (corr + corr.T)
            res = lyapunov_residual(k, v, r)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Lyapunov solve failed: {exc}") from exc
    if not np.isfinite(res):
        raise NumericalError("Lyapunov solve produced non-finite values")
    if res > LYAPUNOV_RTOL:
        logger.warning("Lyapunov residual %.3g exceeds %.1g", res, LYAPUNOV_RTOL)
    return v


def char_poly(k: np.ndarray, exact: bool = True) -> np.ndarray:
    """Coefficients a_0..a_n of det(x I - k) with a_0 = 1.

    With ``exact=True`` the Faddeev-LeVerrier recursion runs in integer
    arithmetic on the exact binary value of `k` and the result is rounded once.
    ``exact=False`` uses the float kernel, which is only trustworthy for
    well-conditioned spectra.
    """
    k = np.ascontiguousarray(k, dtype=float)
    if exact:
        return np.array([float(c) for c in char_poly_exact(k)])
    return kernels.faddeev_leverrier(k)


def hurwitz_determinants(a, exact: bool = True) -> np.ndarray:
    """Leading principal minors Lambda_1..Lambda_n of the Hurwitz matrix of `a`."""
    if a[0] <= 0:
        raise ValueError("leading coefficient a_0 must be positive")
    if exact:
        return np.array([float(x) for x in hurwitz_determinants_exact(list(a))])
    return kernels.hurwitz_minors(np.ascontiguousarray(a, dtype=float))


@dataclass(frozen=True)
class StabilityReport:
    """Both stability verdicts for one drift matrix.

    ``char_coeffs`` and ``hurwitz`` refer to ``k / time_scale`` so their
    magnitudes stay representable; positivity is unaffected by the rescaling.
    """

    max_real_eig: float
    char_coeffs: np.ndarray
    hurwitz: np.ndarray
    stable_by_eig: bool
    stable_by_rh: bool
    time_scale: float
    rh_margin: float

    @property
    def hurwitz_min(self) -> float:
        return float(np.min(self.hurwitz))

    @property
    def agree(self) -> bool:
        return self.stable_by_eig == self.stable_by_rh

    def in_boundary_band(self, rtol: float = 1e-6) -> bool:
        return self.rh_margin <= rtol


def stability_report(k: np.ndarray, time_scale: float | None = None) -> StabilityReport:
    """Eigenvalue and Routh-Hurwitz verdicts for `k`.

    `time_scale` is rounded to a power of two so the rescaled matrix is exact.
    By default it is the geometric mean of the diagonal magnitudes.
    """
    max_re, stable_eig = eigen_stability(k)
    if time_scale is None:
        diag = np.abs(np.diag(k))
        diag = diag[diag > 0]
        time_scale = float(np.exp(np.mean(np.log(diag)))) if diag.size else 1.0
    scale = 2.0 ** round(math.log2(time_scale))
    ks = k / scale
    coeffs_exact = char_poly_exact(ks)
    minors_exact = hurwitz_determinants_exact(coeffs_exact)
    stable_rh = all(m > 0 for m in minors_exact)
    minors = np.array([float(m) for m in minors_exact])
    # scale of each minor: the same minor for the polynomial whose roots are
    # -|lambda_i|, which is stable with every minor strictly positive
    mags = np.abs(np.linalg.eigvals(ks))
    ref = hurwitz_determinants_exact(list(np.real(np.poly(-mags))))
    margin = min(float(abs(m) / r) if r > 0 else 0.0 for m, r in zip(minors_exact, ref))
    return StabilityReport(
        max_real_eig=max_re,
        char_coeffs=np.array([float(c) for c in coeffs_exact]),
        hurwitz=minors,
        stable_by_eig=stable_eig,
        stable_by_rh=stable_rh,
        time_scale=scale,
        rh_margin=margin,
    )


def is_marginal(max_real_eig: float, omega_ref: float) -> bool:
    return -MARGINAL_RTOL * omega_ref < max_real_eig < 0.0
