"""Directional Gaussian steering between the two mirrors.

Covariances here use the convention where the vacuum is I/2. Where a formula
expects vacuum = I, the matrix is rescaled by 2 explicitly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NonPositiveDeterminant

STEERING_TOL = 1e-9


class Direction(str, enum.Enum):
    ONE_TO_TWO = "1to2"
    TWO_TO_ONE = "2to1"


class Regime(str, enum.Enum):
    TWO_WAY = "two_way"
    ONE_WAY_1TO2 = "one_way_1to2"
    ONE_WAY_2TO1 = "one_way_2to1"
    NO_WAY = "no_way"


class MechCovariance(NamedTuple):
    """Two-mode mirror covariance with its 2x2 partitions."""

    v: np.ndarray

    @property
    def a(self) -> np.ndarray:
        return self.v[:2, :2]

    @property
    def b(self) -> np.ndarray:
        return self.v[2:, 2:]

    @property
    def c(self) -> np.ndarray:
        return self.v[:2, 2:]


@dataclass(frozen=True)
class SteeringResult:
    g_1to2: float
    g_2to1: float
    regime: Regime
    energy_diff: float
    # "hbar_wm_over_2" for equal mirror frequencies, otherwise "J"
    energy_units: str = "hbar_wm_over_2"


def mech_block(full: np.ndarray) -> MechCovariance:
    """The mirror-only 4x4 block (cavity modes traced out)."""
    full = np.asarray(full, dtype=float)
    if full.shape[0] < 4 or full.shape[0] != full.shape[1]:
        raise ValueError(f"expected a square covariance of size >= 4, got {full.shape}")
    return MechCovariance(full[:4, :4].copy())


def _as_mech(v) -> MechCovariance:
    return v if isinstance(v, MechCovariance) else MechCovariance(np.asarray(v, dtype=float))


def _direction(direction) -> Direction:
    return Direction(direction.value if isinstance(direction, Direction) else str(direction))


def steering_det(v, direction=Direction.ONE_TO_TWO) -> float:
    """Steerability from the closed two-mode formula max(0, 1/2 ln(det A_steer / (4 det v)))."""
    v = _as_mech(v)
    det_v = float(np.linalg.det(v.v))
    if det_v <= 0:
        raise NonPositiveDeterminant(f"det of the two-mode covariance is {det_v:.6g}")
    steer = v.a if _direction(direction) is Direction.ONE_TO_TWO else v.b
    det_s = float(np.linalg.det(steer))
    if det_s <= 0:
        raise NonPositiveDeterminant(f"det of the steering-party block is {det_s:.6g}")
    return max(0.0, 0.5 * math.log(det_s / (4.0 * det_v)))


def schur_complement(sigma: np.ndarray, direction=Direction.ONE_TO_TWO) -> np.ndarray:
    """Schur complement of the steering party's block in a 4x4 covariance."""
    a, b, c = sigma[:2, :2], sigma[2:, 2:], sigma[:2, 2:]
    if _direction(direction) is Direction.ONE_TO_TWO:
        return b - c.T @ np.linalg.solve(a, c)
    return a - c @ np.linalg.solve(b, c.T)


def steering_symplectic(v, direction=Direction.ONE_TO_TWO) -> float:
    """Steerability from the symplectic spectrum of the Schur complement.

    With sigma = 2 v, the steered mode's conditional covariance M has the single
    symplectic eigenvalue sqrt(det M); the measure is max(0, -ln of it).
    """
    sigma = 2.0 * _as_mech(v).v
    steer = sigma[:2, :2] if _direction(direction) is Direction.ONE_TO_TWO else sigma[2:, 2:]
    if abs(np.linalg.det(steer)) < 1e-300:
        raise NonPositiveDeterminant("steering-party block is singular")
    m = schur_complement(sigma, direction)
    det_m = float(np.linalg.det(m))
    if det_m <= 0:
        raise NonPositiveDeterminant(f"Schur complement has det {det_m:.6g}")
    # one steered mode: its symplectic eigenvalue is sqrt(det M)
    return max(0.0, -0.5 * math.log(det_m))


def symplectic_form(n_modes: int) -> np.ndarray:
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues (ascending, one per mode) of a (q, p)-interleaved covariance."""
    n = sigma.shape[0] // 2
    eig = np.linalg.eigvals(1j * symplectic_form(n) @ sigma)
    return np.sort(np.abs(eig.real))[::2]


def min_symplectic_eigenvalue(full: np.ndarray) -> float:
    """Smallest symplectic eigenvalue of 2 v; >= 1 for a physical state."""
    return float(symplectic_eigenvalues(2.0 * np.asarray(full, dtype=float))[0])


def ppt_min_symplectic(v) -> float:
    """Smallest symplectic eigenvalue of the partially transposed 2 v (< 1 iff entangled)."""
    v = _as_mech(v)
    sigma = 2.0 * v.v
    det_a = np.linalg.det(sigma[:2, :2])
    det_b = np.linalg.det(sigma[2:, 2:])
    det_c = np.linalg.det(sigma[:2, 2:])
    det_s = np.linalg.det(sigma)
    delta = det_a + det_b - 2.0 * det_c
    disc = max(delta * delta - 4.0 * det_s, 0.0)
    return float(math.sqrt(max((delta - math.sqrt(disc)) / 2.0, 0.0)))


def mech_energy_diff(v, omega_m1: float | None = None, omega_m2: float | None = None):
    """E_1 - E_2 of the mirrors.

    In units of hbar omega_m / 2 when the frequencies are equal (or omitted);
    otherwise in joules. Returns ``(value, units)``.
    """
    v = _as_mech(v).v
    s1 = v[0, 0] + v[1, 1]
    s2 = v[2, 2] + v[3, 3]
    if omega_m1 is None or omega_m2 is None or omega_m1 == omega_m2:
        return float(s1 - s2), "hbar_wm_over_2"
    from .params import HBAR

    return float(0.5 * HBAR * (omega_m1 * s1 - omega_m2 * s2)), "J"


def classify(g_1to2: float, g_2to1: float, tol: float = STEERING_TOL) -> Regime:
    if g_1to2 < 0 or g_2to1 < 0:
        raise ValueError("steerabilities are non-negative")
    s12 = g_1to2 > tol
    s21 = g_2to1 > tol
    if s12 and s21:
        return Regime.TWO_WAY
    if s12:
        return Regime.ONE_WAY_1TO2
    if s21:
        return Regime.ONE_WAY_2TO1
    return Regime.NO_WAY


def analyze(full_or_mech, omega_m1: float | None = None,
            omega_m2: float | None = None) -> SteeringResult:
    """Both steerabilities, the regime and the energy asymmetry of one state."""
    arr = np.asarray(full_or_mech.v if isinstance(full_or_mech, MechCovariance) else full_or_mech)
    mech = mech_block(arr) if arr.shape[0] > 4 else MechCovariance(arr)
    g12 = steering_det(mech, Direction.ONE_TO_TWO)
    g21 = steering_det(mech, Direction.TWO_TO_ONE)
    energy, units = mech_energy_diff(mech, omega_m1, omega_m2)
    return SteeringResult(g12, g21, classify(g12, g21), energy, units)
