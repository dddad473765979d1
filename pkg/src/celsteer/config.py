"""JSON configuration loading.

Physical quantities are objects ``{"value": x, "unit": "kHz", "times_two_pi": true}``.
A frequency-type value is taken as an angular rate in rad/s after applying the
unit prefix; ``times_two_pi`` multiplies it by 2 pi (use it for values quoted
as cyclic frequencies). Ratios (``g_over_wm``, ``omega_over_gamma``, ``n_th``)
are bare numbers. Any section or key left out falls back to the reference
parameter set.
"""
from __future__ import annotations

import copy
import json
import logging
import math
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import Any, Optional

from .errors import ConfigError
from .params import (TWO_PI, CavityParams, DriveSpec, GainMediumParams, MechanicalParams,
                     SystemParams)
from .sweep import DEFAULT_POINTS_1D, DEFAULT_POINTS_2D, ALL_OUTPUTS, Axis, SweepSpec

logger = logging.getLogger(__name__)

# unit -> (dimension, factor)
UNITS = {
    "Hz": ("rate", "1"), "kHz": ("rate", "1e3"), "MHz": ("rate", "1e6"), "GHz": ("rate", "1e9"),
    "THz": ("rate", "1e12"), "rad/s": ("rate", "1"),
    "K": ("temperature", "1"), "mK": ("temperature", "1e-3"), "uK": ("temperature", "1e-6"),
    "W": ("power", "1"), "mW": ("power", "1e-3"),
    "m": ("length", "1"), "mm": ("length", "1e-3"),
    "kg": ("mass", "1"), "g": ("mass", "1e-3"), "mg": ("mass", "1e-6"), "ng": ("mass", "1e-12"),
    "s": ("time", "1"), "ms": ("time", "1e-3"), "us": ("time", "1e-6"), "ns": ("time", "1e-9"),
    "dimensionless": ("dimensionless", "1"),
}


def _q(value, unit, two_pi=False):
    return {"value": value, "unit": unit, "times_two_pi": two_pi}


DEFAULTS: dict = {
    "gain": {
        "linear_gain_A": _q(250, "MHz"),
        "atomic_decay_gamma": _q(1.7, "MHz"),
        "omega_over_gamma": 6.0,
    },
    "cavity_1": {"kappa": _q(215, "kHz", True), "g_over_wm": 0.25},
    "cavity_2": {"kappa": _q(215, "kHz", True), "g_over_wm": 0.25},
    "mirror_1": {"omega_m": _q(947, "kHz", True), "gamma_m": _q(140, "Hz", True), "n_th": 15.0},
    "mirror_2": {"omega_m": _q(947, "kHz", True), "gamma_m": _q(140, "Hz", True), "n_th": 5.0},
}

# key -> expected dimension, or "ratio" for bare numbers
_GAIN_KEYS = {
    "linear_gain_A": "rate", "atomic_decay_gamma": "rate", "drive_strength_Omega": "rate",
    "omega_over_gamma": "ratio", "injection_rate_r0": "rate", "atom_field_coupling": "rate",
    "transit_time_tau": "time",
}
_CAVITY_KEYS = {"kappa": "rate", "g_over_wm": "ratio", "effective_coupling_G": "rate",
                "drive": "section"}
_DRIVE_KEYS = {"power": "power", "drive_frequency_omega_L": "rate",
               "cavity_frequency_nu": "rate", "cavity_length_l": "length",
               "mirror_mass_mu": "mass"}
_MIRROR_KEYS = {"omega_m": "rate", "gamma_m": "rate", "n_th": "ratio",
                "temperature": "temperature"}

# alternatives: a user key from one group replaces every default key of the others
_ALTERNATIVES = {
    "gain": [({"linear_gain_A"}, {"injection_rate_r0", "atom_field_coupling"}),
             ({"omega_over_gamma"}, {"drive_strength_Omega"})],
    "cavity": [({"g_over_wm", "effective_coupling_G"}, {"drive"})],
    "mirror": [({"n_th"}, {"temperature"})],
}
# keys that may not be given together (a direct coupling plus a drive is allowed;
# the direct value wins with a warning)
_CONFLICTS = {
    "gain": [("linear_gain_A", "injection_rate_r0"), ("linear_gain_A", "atom_field_coupling"),
             ("omega_over_gamma", "drive_strength_Omega")],
    "cavity": [("g_over_wm", "effective_coupling_G")],
    "mirror": [("n_th", "temperature")],
}


@dataclass(frozen=True)
class LoadedConfig:
    params: SystemParams
    sweep: Optional[SweepSpec] = None
    oracle: Optional[dict] = None


def parse_quantity(key: str, raw: Any, dimension: str) -> tuple[float, dict]:
    """Convert a quantity object to SI (angular for rates). Returns (value, provenance)."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{key}: expected an object with value/unit/times_two_pi, got {raw!r}")
    extra = set(raw) - {"value", "unit", "times_two_pi"}
    if extra:
        raise ConfigError(f"{key}: unknown field(s) {sorted(extra)}")
    if "value" not in raw or "unit" not in raw:
        raise ConfigError(f"{key}: both 'value' and 'unit' are required")
    value, unit = raw["value"], raw["unit"]
    two_pi = raw.get("times_two_pi", False)
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{key}.value: must be a finite number, got {value!r}")
    if unit not in UNITS:
        raise ConfigError(f"{key}.unit: unknown unit {unit!r}; choose from {sorted(UNITS)}")
    dim, factor = UNITS[unit]
    if dim != dimension:
        raise ConfigError(f"{key}.unit: {unit!r} is a {dim} unit, expected a {dimension} unit")
    if not isinstance(two_pi, bool):
        raise ConfigError(f"{key}.times_two_pi: must be true or false")
    if two_pi and dimension != "rate":
        raise ConfigError(f"{key}.times_two_pi: only meaningful for rates")
    # decimal scaling keeps e.g. 1.7 MHz == 1.7e6 exactly
    si = float(Decimal(repr(value)) * Decimal(factor))
    if two_pi:
        si *= TWO_PI
    return si, {"value": value, "unit": unit, "times_two_pi": two_pi}


def _ratio(key, raw):
    if isinstance(raw, bool) or not isinstance(raw, (int, float)) or not math.isfinite(raw):
        raise ConfigError(f"{key}: must be a finite bare number, got {raw!r}")
    return float(raw)


def _merge(section: str, kind: str, default: dict, user: dict) -> dict:
    for a, b in _CONFLICTS[kind]:
        if a in user and b in user:
            raise ConfigError(f"{section}: {a} and {b} are mutually exclusive")
    merged = copy.deepcopy(default)
    for alts in _ALTERNATIVES[kind]:
        if any(g & set(user) for g in alts):
            for k in set().union(*alts) - set(user):
                merged.pop(k, None)
    merged.update(user)
    return merged


def _check_keys(section, data, allowed):
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"{section}: unknown key(s) {unknown}; allowed {sorted(allowed)}")


def _read_fields(section, data, schema, units):
    out = {}
    for key, value in data.items():
        kind = schema[key]
        path = f"{section}.{key}"
        if kind == "ratio":
            out[key] = _ratio(path, value)
        elif kind == "section":
            continue
        else:
            out[key], units[path] = parse_quantity(path, value, kind)
    return out


def _build_gain(data, units) -> GainMediumParams:
    f = _read_fields("gain", data, _GAIN_KEYS, units)
    if "atomic_decay_gamma" not in f:
        raise ConfigError("gain.atomic_decay_gamma: required")
    gamma = f["atomic_decay_gamma"]
    if not gamma > 0:
        raise ConfigError("gain.atomic_decay_gamma: must be > 0")
    if "omega_over_gamma" in f:
        omega = f["omega_over_gamma"] * gamma
    elif "drive_strength_Omega" in f:
        omega = f["drive_strength_Omega"]
    else:
        raise ConfigError("gain: one of omega_over_gamma or drive_strength_Omega is required")
    try:
        if "linear_gain_A" in f:
            return GainMediumParams(f["linear_gain_A"], gamma, omega,
                                    transit_time_tau=f.get("transit_time_tau"))
        if "injection_rate_r0" in f and "atom_field_coupling" in f:
            return GainMediumParams.from_microscopic(f["injection_rate_r0"],
                                                     f["atom_field_coupling"], gamma, omega,
                                                     f.get("transit_time_tau"))
    except ConfigError as exc:
        raise ConfigError(f"gain: {exc}") from None
    raise ConfigError("gain: give linear_gain_A or both injection_rate_r0 and atom_field_coupling")


def _build_cavity(section, data, units) -> CavityParams:
    f = _read_fields(section, data, _CAVITY_KEYS, units)
    if "kappa" not in f:
        raise ConfigError(f"{section}.kappa: required")
    drive = None
    if "drive" in data:
        d = data["drive"]
        _check_keys(f"{section}.drive", d, _DRIVE_KEYS)
        missing = sorted(set(_DRIVE_KEYS) - set(d))
        if missing:
            raise ConfigError(f"{section}.drive: missing {missing}")
        df = _read_fields(f"{section}.drive", d, _DRIVE_KEYS, units)
        try:
            drive = DriveSpec(**df)
        except ConfigError as exc:
            raise ConfigError(f"{section}.{exc}") from None
    try:
        return CavityParams(f["kappa"], effective_coupling_G=f.get("effective_coupling_G"),
                            g_over_wm=f.get("g_over_wm"), drive=drive)
    except ConfigError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def _build_mirror(section, data, units) -> MechanicalParams:
    f = _read_fields(section, data, _MIRROR_KEYS, units)
    for key in ("omega_m", "gamma_m"):
        if key not in f:
            raise ConfigError(f"{section}.{key}: required")
    try:
        return MechanicalParams(f["omega_m"], f["gamma_m"], n_th=f.get("n_th"),
                                temperature=f.get("temperature"))
    except ConfigError as exc:
        raise ConfigError(f"{section}: {exc}") from None


def _build_axis(key, raw, default_points) -> Axis:
    _check_keys(key, raw, {"path", "min", "max", "n_points", "scale"})
    for req in ("path", "min", "max"):
        if req not in raw:
            raise ConfigError(f"{key}.{req}: required")
    n = raw.get("n_points", default_points)
    if isinstance(n, bool) or not isinstance(n, int):
        raise ConfigError(f"{key}.n_points: must be an integer")
    try:
        return Axis(raw["path"], _ratio(f"{key}.min", raw["min"]), _ratio(f"{key}.max", raw["max"]),
                    n, raw.get("scale", "linear"))
    except ConfigError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _build_sweep(raw) -> SweepSpec:
    _check_keys("sweep", raw, {"axis1", "axis2", "outputs"})
    if "axis1" not in raw:
        raise ConfigError("sweep.axis1: required")
    two_d = "axis2" in raw and raw["axis2"] is not None
    ax1 = _build_axis("sweep.axis1", raw["axis1"],
                      DEFAULT_POINTS_2D[0] if two_d else DEFAULT_POINTS_1D)
    ax2 = _build_axis("sweep.axis2", raw["axis2"], DEFAULT_POINTS_2D[1]) if two_d else None
    outputs = raw.get("outputs", list(ALL_OUTPUTS))
    if not isinstance(outputs, list) or not all(isinstance(o, str) for o in outputs):
        raise ConfigError("sweep.outputs: must be a list of output names")
    try:
        return SweepSpec(ax1, ax2, tuple(outputs))
    except ConfigError as exc:
        raise ConfigError(f"sweep: {exc}") from None


_ORACLE_KEYS = {"dt", "n_steps", "n_trajectories", "burn_in_fraction", "seed"}


def _build_oracle(raw) -> dict:
    _check_keys("oracle", raw, _ORACLE_KEYS)
    out = {}
    for key, value in raw.items():
        if key == "dt":
            out["dt"], _ = parse_quantity("oracle.dt", value, "time")
        elif key == "burn_in_fraction":
            out[key] = _ratio(f"oracle.{key}", value)
        else:
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ConfigError(f"oracle.{key}: must be a non-negative integer")
            out[key] = value
    return out


def config_from_dict(doc: dict) -> LoadedConfig:
    """Validate a parsed config document and build the parameter records."""
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be an object")
    sections = {"gain": "gain", "cavity_1": "cavity", "cavity_2": "cavity",
                "mirror_1": "mirror", "mirror_2": "mirror"}
    _check_keys("config", doc, set(sections) | {"sweep", "oracle", "description"})
    merged = {}
    schemas = {"gain": _GAIN_KEYS, "cavity": _CAVITY_KEYS, "mirror": _MIRROR_KEYS}
    for name, kind in sections.items():
        user = doc.get(name, {})
        _check_keys(name, user, schemas[kind])
        merged[name] = _merge(name, kind, DEFAULTS[name], user)

    units: dict = {}
    params = SystemParams(
        gain=_build_gain(merged["gain"], units),
        cavity_1=_build_cavity("cavity_1", merged["cavity_1"], units),
        cavity_2=_build_cavity("cavity_2", merged["cavity_2"], units),
        mirror_1=_build_mirror("mirror_1", merged["mirror_1"], units),
        mirror_2=_build_mirror("mirror_2", merged["mirror_2"], units),
        meta={"units": units},
    )
    sweep = _build_sweep(doc["sweep"]) if doc.get("sweep") is not None else None
    oracle = _build_oracle(doc["oracle"]) if doc.get("oracle") is not None else None
    return LoadedConfig(params, sweep, oracle)


def load_config(path: Optional[str | Path]) -> LoadedConfig:
    """Read and validate a JSON config file; ``None`` gives the reference defaults."""
    if path is None:
        return config_from_dict({})
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(doc)
