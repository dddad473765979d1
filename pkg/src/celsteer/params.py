"""Physical parameter records.

All rates and frequencies are angular (rad/s). Masses are kg, lengths m,
powers W, temperatures K.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Optional

from .errors import ConfigError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# SI 2019 exact values
HBAR = 1.054571817e-34
K_B = 1.380649e-23

MIN_QUALITY_FACTOR = 100.0


def _finite(name, value):
    if value is None or not math.isfinite(value):
        raise ConfigError(f"{name} must be a finite number, got {value!r}")


@dataclass(frozen=True)
class GainMediumParams:
    linear_gain_A: float
    atomic_decay_gamma: float
    drive_strength_Omega: float
    # provenance only; they enter the model through linear_gain_A
    injection_rate_r0: Optional[float] = None
    atom_field_coupling: Optional[float] = None
    transit_time_tau: Optional[float] = None

    def __post_init__(self):
        for name in ("linear_gain_A", "atomic_decay_gamma", "drive_strength_Omega"):
            _finite(name, getattr(self, name))
        if self.linear_gain_A < 0:
            raise ConfigError("linear_gain_A must be >= 0")
        if self.atomic_decay_gamma <= 0:
            raise ConfigError("atomic_decay_gamma must be > 0")
        if self.drive_strength_Omega < 0:
            raise ConfigError("drive_strength_Omega must be >= 0")

    @classmethod
    def from_microscopic(cls, injection_rate_r0, atom_field_coupling, atomic_decay_gamma,
                         drive_strength_Omega, transit_time_tau=None):
        """Build from the pump rate and atom-field coupling, A = 2 r0 s^2 / gamma^2."""
        _finite("injection_rate_r0", injection_rate_r0)
        _finite("atom_field_coupling", atom_field_coupling)
        _finite("atomic_decay_gamma", atomic_decay_gamma)
        if atomic_decay_gamma <= 0:
            raise ConfigError("atomic_decay_gamma must be > 0")
        if injection_rate_r0 < 0:
            raise ConfigError("injection_rate_r0 must be >= 0")
        a = 2.0 * injection_rate_r0 * atom_field_coupling**2 / atomic_decay_gamma**2
        return cls(a, atomic_decay_gamma, drive_strength_Omega,
                   injection_rate_r0=injection_rate_r0,
                   atom_field_coupling=atom_field_coupling,
                   transit_time_tau=transit_time_tau)

    @property
    def omega_over_gamma(self) -> float:
        return self.drive_strength_Omega / self.atomic_decay_gamma

    def with_omega_over_gamma(self, ratio: float) -> "GainMediumParams":
        return replace(self, drive_strength_Omega=ratio * self.atomic_decay_gamma)


@dataclass(frozen=True)
class DriveSpec:
    power: float
    drive_frequency_omega_L: float
    cavity_frequency_nu: float
    cavity_length_l: float
    mirror_mass_mu: float

    def __post_init__(self):
        for name in ("power", "drive_frequency_omega_L", "cavity_frequency_nu",
                     "cavity_length_l", "mirror_mass_mu"):
            value = getattr(self, name)
            _finite(name, value)
            if value <= 0:
                raise ConfigError(f"drive.{name} must be > 0")


@dataclass(frozen=True)
class CavityParams:
    """A cavity mode.

    The effective coupling G is resolved, in order of precedence, from
    ``g_over_wm`` (ratio to the partner mirror frequency), ``effective_coupling_G``
    (rad/s), or ``drive`` (physical drive, G = g |<c>|).
    """

    kappa: float
    effective_coupling_G: Optional[float] = None
    g_over_wm: Optional[float] = None
    drive: Optional[DriveSpec] = None

    def __post_init__(self):
        _finite("kappa", self.kappa)
        if self.kappa <= 0:
            raise ConfigError("kappa must be > 0")
        for name in ("effective_coupling_G", "g_over_wm"):
            value = getattr(self, name)
            if value is not None:
                _finite(name, value)
                if value < 0:
                    raise ConfigError(f"{name} must be >= 0")
        if self.effective_coupling_G is None and self.g_over_wm is None and self.drive is None:
            raise ConfigError("cavity needs one of g_over_wm, effective_coupling_G or drive")

    def with_g_over_wm(self, ratio: float) -> "CavityParams":
        return replace(self, g_over_wm=ratio)


@dataclass(frozen=True)
class MechanicalParams:
    omega_m: float
    gamma_m: float
    n_th: Optional[float] = None
    temperature: Optional[float] = None

    def __post_init__(self):
        _finite("omega_m", self.omega_m)
        _finite("gamma_m", self.gamma_m)
        if self.omega_m <= 0 or self.gamma_m <= 0:
            raise ConfigError("omega_m and gamma_m must be > 0")
        if (self.n_th is None) == (self.temperature is None):
            raise ConfigError("mirror bath needs exactly one of n_th or temperature")
        if self.n_th is not None:
            _finite("n_th", self.n_th)
            if self.n_th < 0:
                raise ConfigError("n_th must be >= 0")
        if self.temperature is not None:
            _finite("temperature", self.temperature)
            if self.temperature <= 0:
                raise ConfigError("temperature must be > 0")
        if self.quality_factor <= MIN_QUALITY_FACTOR:
            logger.warning("mechanical quality factor %.3g <= %g; the Markov bath "
                           "approximation is doubtful", self.quality_factor, MIN_QUALITY_FACTOR)

    @property
    def quality_factor(self) -> float:
        return self.omega_m / self.gamma_m

    @property
    def occupation(self) -> float:
        if self.n_th is not None:
            return self.n_th
        from .gain import thermal_occupation

        return thermal_occupation(self.omega_m, self.temperature)

    def with_n_th(self, n: float) -> "MechanicalParams":
        return replace(self, n_th=n, temperature=None)


@dataclass(frozen=True)
class SystemParams:
    """Full model input. The drive detuning is fixed at the anti-Stokes sideband."""

    gain: GainMediumParams
    cavity_1: CavityParams
    cavity_2: CavityParams
    mirror_1: MechanicalParams
    mirror_2: MechanicalParams
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def cavity(self, index: int) -> CavityParams:
        return (self.cavity_1, self.cavity_2)[_check_index(index) - 1]

    def mirror(self, index: int) -> MechanicalParams:
        return (self.mirror_1, self.mirror_2)[_check_index(index) - 1]


def _check_index(index):
    if index not in (1, 2):
        raise ConfigError(f"mode index must be 1 or 2, got {index!r}")
    return index


def reference_defaults(omega_over_gamma=6.0, g_over_wm=(0.25, 0.25), n_th=(15.0, 5.0)) -> SystemParams:
    """The reference parameter set: identical mirrors and cavities.

    kappa = 2pi x 215 kHz, gamma_m = 2pi x 140 Hz, omega_m = 2pi x 947 kHz,
    A = 250 MHz and gamma = 1.7 MHz taken as bare rad/s values (no 2pi factor).
    """
    gamma = 1.7e6
    gain = GainMediumParams(250e6, gamma, omega_over_gamma * gamma)
    kappa = TWO_PI * 215e3
    wm = TWO_PI * 947e3
    gm = TWO_PI * 140.0
    return SystemParams(
        gain=gain,
        cavity_1=CavityParams(kappa, g_over_wm=g_over_wm[0]),
        cavity_2=CavityParams(kappa, g_over_wm=g_over_wm[1]),
        mirror_1=MechanicalParams(wm, gm, n_th=n_th[0]),
        mirror_2=MechanicalParams(wm, gm, n_th=n_th[1]),
    )
