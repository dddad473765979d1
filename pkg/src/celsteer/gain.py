"""Scalar model quantities: gain-medium rates, bath occupations, cavity amplitudes
and effective optomechanical couplings."""
from __future__ import annotations

import logging
import math
from typing import NamedTuple

from .errors import ConfigError, NearSingularError
from .params import HBAR, K_B, CavityParams, DriveSpec, GainMediumParams, MechanicalParams

logger = logging.getLogger(__name__)

_EXP_OVERFLOW = 700.0


class XiCoefficients(NamedTuple):
    """Gain-medium rates (rad/s).

    ``xi11`` is the gain of cavity 1, ``xi22`` the extra loss of cavity 2, and
    ``xi12``/``xi21`` the coherence-induced cross couplings.
    """

    xi11: float
    xi22: float
    xi12: float
    xi21: float


def compute_xi(gain: GainMediumParams) -> XiCoefficients:
    """Closed-form gain coefficients of the correlated-emission laser.

    Parameters
    ----------
    gain : GainMediumParams
        Linear gain A, atomic decay gamma, and coherence drive Omega.

    Returns
    -------
    XiCoefficients
    """
    a = gain.linear_gain_A
    g = gain.atomic_decay_gamma
    om = gain.drive_strength_Omega
    for name, v in (("linear_gain_A", a), ("atomic_decay_gamma", g), ("drive_strength_Omega", om)):
        if not math.isfinite(v):
            raise ConfigError(f"{name} must be finite")
    if g == 0:
        raise ConfigError("atomic_decay_gamma must be nonzero")
    om2 = om * om
    g2 = g * g
    d1 = om2 + g2
    d2 = 0.25 * om2 + g2
    xi11 = 0.375 * a * om2 * g2 / (d1 * d2)
    xi22 = 0.5 * a * g2 / d1
    xi12 = -0.5 * a * om * g / d1
    xi21 = 0.125 * a * om * g * (om2 - 2.0 * g2) / (d1 * d2)
    return XiCoefficients(xi11, xi22, xi12, xi21)


def thermal_occupation(omega_m: float, temperature: float) -> float:
    """Bose-Einstein mean phonon number at angular frequency `omega_m` and temperature (K)."""
    if not (temperature > 0):
        raise ConfigError(f"temperature must be > 0 K, got {temperature!r}")
    if not (omega_m > 0):
        raise ConfigError(f"omega_m must be > 0, got {omega_m!r}")
    x = HBAR * omega_m / (K_B * temperature)
    if x > _EXP_OVERFLOW:
        return 0.0
    return 1.0 / math.expm1(x)


def temperature_for(n_th: float, omega_m: float) -> float:
    """Inverse of `thermal_occupation`: the bath temperature giving occupation `n_th`."""
    if not (n_th >= 0) or not math.isfinite(n_th):
        raise ConfigError(f"n_th must be finite and >= 0, got {n_th!r}")
    if n_th == 0:
        return 0.0
    return HBAR * omega_m / (K_B * math.log1p(1.0 / n_th))


def cavity_steady_amplitude(epsilon: float, kappa: float, delta_prime: float,
                            xi_jj_signed: float) -> complex:
    """Steady-state intracavity amplitude eps / (kappa + i delta' + xi_jj_signed).

    `xi_jj_signed` is -xi11 for cavity 1 (gain) and +xi22 for cavity 2 (loss).
    """
    denom = complex(kappa + xi_jj_signed, delta_prime)
    if abs(denom) < 1e-12 * abs(epsilon):
        raise NearSingularError(
            f"cavity amplitude denominator {denom!r} is numerically zero "
            f"(gain cancels decay at zero detuning)")
    if epsilon == 0:
        return 0j
    return epsilon / denom


def drive_amplitude(kappa: float, power: float, drive_frequency_omega_L: float) -> float:
    """Cavity drive rate eps = sqrt(2 kappa P / (hbar omega_L))."""
    return math.sqrt(2.0 * kappa * power / (HBAR * drive_frequency_omega_L))


def bare_coupling(cavity_frequency_nu: float, cavity_length_l: float, mirror_mass_mu: float,
                  omega_m: float) -> float:
    """Single-photon optomechanical coupling g = (nu / l) sqrt(hbar / (mu omega_m))."""
    return (cavity_frequency_nu / cavity_length_l) * math.sqrt(HBAR / (mirror_mass_mu * omega_m))


def signed_gain(xi: XiCoefficients, index: int) -> float:
    """(-1)^j xi_jj: the gain term entering cavity j's effective linewidth."""
    if index == 1:
        return -xi.xi11
    if index == 2:
        return xi.xi22
    raise ConfigError(f"mode index must be 1 or 2, got {index!r}")


def effective_coupling(cavity: CavityParams, mirror: MechanicalParams, xi: XiCoefficients,
                       index: int) -> float:
    """Effective many-photon coupling G_j >= 0 (rad/s)."""
    direct = None
    if cavity.g_over_wm is not None:
        direct = cavity.g_over_wm * mirror.omega_m
    elif cavity.effective_coupling_G is not None:
        direct = cavity.effective_coupling_G
    if direct is not None:
        if cavity.drive is not None:
            logger.warning("cavity %d: both a direct coupling and a drive spec are given; "
                           "using the direct coupling", index)
        return float(direct)
    drive = cavity.drive
    if not isinstance(drive, DriveSpec):
        raise ConfigError(f"cavity {index}: drive spec incomplete")
    eps = drive_amplitude(cavity.kappa, drive.power, drive.drive_frequency_omega_L)
    # anti-Stokes operating point: delta' = +omega_m
    amp = cavity_steady_amplitude(eps, cavity.kappa, mirror.omega_m, signed_gain(xi, index))
    g = bare_coupling(drive.cavity_frequency_nu, drive.cavity_length_l, drive.mirror_mass_mu,
                      mirror.omega_m)
    return g * abs(amp)
