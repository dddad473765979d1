"""Single-point pipeline and grid sweeps with deterministic CSV output."""
from __future__ import annotations

import csv
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import IO, Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .dynamics import (build_diffusion, build_drift, eigen_stability, is_marginal, is_psd,
                       lyapunov_residual, solve_lyapunov, stability_report)
from .errors import CelsteerError, ConfigError
from .gain import compute_xi
from .params import SystemParams
from .steering import analyze

logger = logging.getLogger(__name__)

ALL_OUTPUTS = ("steering_1to2", "steering_2to1", "regime", "energy_diff",
               "max_real_eig", "hurwitz_min", "lyapunov_residual")
STEERING_OUTPUTS = ("steering_1to2", "steering_2to1", "regime")

# canonical paths plus short aliases
SWEEP_PATHS = ("gain.omega_over_gamma", "mirror_1.n_th", "mirror_2.n_th", "n_th",
               "cavity_1.g_over_wm", "cavity_2.g_over_wm", "g_over_wm")
_ALIASES = {
    "omega_over_gamma": "gain.omega_over_gamma",
    "g1_over_wm": "cavity_1.g_over_wm",
    "g2_over_wm": "cavity_2.g_over_wm",
    "n1_th": "mirror_1.n_th",
    "n2_th": "mirror_2.n_th",
}

DEFAULT_POINTS_1D = 481
DEFAULT_POINTS_2D = (121, 161)


def canonical_path(path: str) -> str:
    path = _ALIASES.get(path, path)
    if path not in SWEEP_PATHS:
        raise ConfigError(f"sweep path {path!r} is not sweepable; choose from {', '.join(SWEEP_PATHS)}")
    return path


def apply_path(params: SystemParams, path: str, value: float) -> SystemParams:
    """Copy of `params` with the sweepable parameter at `path` set to `value`."""
    path = canonical_path(path)
    value = float(value)
    if path == "gain.omega_over_gamma":
        return replace(params, gain=params.gain.with_omega_over_gamma(value))
    if path.endswith("n_th"):
        m1, m2 = params.mirror_1, params.mirror_2
        if path in ("n_th", "mirror_1.n_th"):
            m1 = m1.with_n_th(value)
        if path in ("n_th", "mirror_2.n_th"):
            m2 = m2.with_n_th(value)
        return replace(params, mirror_1=m1, mirror_2=m2)
    c1, c2 = params.cavity_1, params.cavity_2
    if path in ("g_over_wm", "cavity_1.g_over_wm"):
        c1 = c1.with_g_over_wm(value)
    if path in ("g_over_wm", "cavity_2.g_over_wm"):
        c2 = c2.with_g_over_wm(value)
    return replace(params, cavity_1=c1, cavity_2=c2)


@dataclass(frozen=True)
class Axis:
    path: str
    min: float
    max: float
    n_points: int = DEFAULT_POINTS_1D
    scale: str = "linear"

    def __post_init__(self):
        object.__setattr__(self, "path", canonical_path(self.path))
        if not (math.isfinite(self.min) and math.isfinite(self.max)):
            raise ConfigError(f"axis {self.path}: min and max must be finite")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ConfigError(f"axis {self.path}: n_points must be an integer >= 2")
        if self.scale not in ("linear", "log"):
            raise ConfigError(f"axis {self.path}: scale must be 'linear' or 'log'")
        if self.scale == "log" and not (self.min > 0 and self.max > 0):
            raise ConfigError(f"axis {self.path}: log scale needs min, max > 0")

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.min, self.max, int(self.n_points))
        return np.linspace(self.min, self.max, int(self.n_points))


@dataclass(frozen=True)
class SweepSpec:
    """A 1-D or 2-D grid over sweepable parameters of a base `SystemParams`."""

    axis1: Axis
    axis2: Optional[Axis] = None
    outputs: tuple = ALL_OUTPUTS

    def __post_init__(self):
        outs = tuple(self.outputs)
        bad = [o for o in outs if o not in ALL_OUTPUTS]
        if bad:
            raise ConfigError(f"sweep.outputs: unknown output(s) {bad}; choose from {list(ALL_OUTPUTS)}")
        # canonical order regardless of how they were listed
        object.__setattr__(self, "outputs", tuple(o for o in ALL_OUTPUTS if o in outs))
        if self.axis2 is not None and self.axis2.path == self.axis1.path:
            raise ConfigError("sweep axes must differ")

    @property
    def axes(self) -> tuple:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)

    def points(self) -> list[tuple]:
        """Grid coordinates in row-major order (axis1 outer, axis2 inner)."""
        v1 = self.axis1.values()
        if self.axis2 is None:
            return [(float(a),) for a in v1]
        v2 = self.axis2.values()
        return [(float(a), float(b)) for a in v1 for b in v2]


@dataclass
class SweepRow:
    coords: tuple
    status: str
    stable: Optional[bool] = None
    values: dict = field(default_factory=dict)
    error: Optional[str] = None


@dataclass
class PointEvaluation:
    """Everything computed at one point; `v` is None unless the Lyapunov solve ran."""

    row: SweepRow
    k: Optional[np.ndarray] = None
    r: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None


def evaluate_point(params: SystemParams, outputs: Sequence[str] = ALL_OUTPUTS,
                   coords: tuple = ()) -> PointEvaluation:
    """Run the full pipeline at one parameter point.

    Unstable points stop before the Lyapunov solve. Marginal points are not
    solved either. When the diffusion matrix is not PSD the covariance is still
    solved but steering outputs stay empty.
    """
    row = SweepRow(coords=coords, status="ok")
    try:
        xi = compute_xi(params.gain)
        k = build_drift(params, xi)
        r = build_diffusion(params, xi)
        max_re, stable = eigen_stability(k)
    except CelsteerError as exc:
        row.status = "error"
        row.error = f"{type(exc).__name__}: {exc}"
        return PointEvaluation(row)

    row.stable = stable
    row.values["max_real_eig"] = max_re
    if "hurwitz_min" in outputs:
        row.values["hurwitz_min"] = stability_report(k).hurwitz_min
    out = PointEvaluation(row, k, r)
    w_ref = max(params.mirror_1.omega_m, params.mirror_2.omega_m)
    if not stable:
        row.status = "unstable"
        return out
    if is_marginal(max_re, w_ref):
        row.status = "marginal"
        return out

    try:
        v = solve_lyapunov(k, r, check_stability=False)
    except CelsteerError as exc:
        row.status = "error"
        row.error = f"{type(exc).__name__}: {exc}"
        return out
    out.v = v
    row.values["lyapunov_residual"] = lyapunov_residual(k, v, r)
    if not is_psd(r):
        row.status = "r_not_psd"
    try:
        res = analyze(v, params.mirror_1.omega_m, params.mirror_2.omega_m)
    except CelsteerError as exc:
        row.status = "error"
        row.error = f"{type(exc).__name__}: {exc}"
        return out
    row.values["energy_diff"] = res.energy_diff
    if row.status == "ok":
        row.values["steering_1to2"] = res.g_1to2
        row.values["steering_2to1"] = res.g_2to1
        row.values["regime"] = res.regime.value
    return out


def run_point(params: SystemParams, outputs: Sequence[str] = ALL_OUTPUTS) -> SweepRow:
    return evaluate_point(params, outputs).row


def _sweep_task(args):
    base, paths, coords, outputs = args
    p = base
    for path, value in zip(paths, coords):
        p = apply_path(p, path, value)
    row = evaluate_point(p, outputs, coords).row
    if row.error:
        row.error = f"at {dict(zip(paths, coords))}: {row.error}"
    return row


def _stability_task(args):
    base, paths, coords = args
    p = base
    for path, value in zip(paths, coords):
        p = apply_path(p, path, value)
    try:
        rep = stability_report(build_drift(p))
    except CelsteerError as exc:
        return coords, None, f"at {dict(zip(paths, coords))}: {type(exc).__name__}: {exc}"
    return coords, rep, None


def _map(fn, tasks, workers):
    if workers <= 1:
        return [fn(t) for t in tasks]
    chunk = max(1, len(tasks) // (8 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))


def run_sweep(base: SystemParams, spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """Evaluate every grid point; rows come back in row-major grid order."""
    paths = tuple(a.path for a in spec.axes)
    tasks = [(base, paths, c, spec.outputs) for c in spec.points()]
    return _map(_sweep_task, tasks, workers)


@dataclass
class StabilityRow:
    coords: tuple
    report: object
    error: Optional[str] = None


def run_stability_map(base: SystemParams, spec: SweepSpec, workers: int = 1) -> list[StabilityRow]:
    paths = tuple(a.path for a in spec.axes)
    tasks = [(base, paths, c) for c in spec.points()]
    return [StabilityRow(c, rep, err) for c, rep, err in _map(_stability_task, tasks, workers)]


# ---------------------------------------------------------------- CSV output

def fmt(value) -> str:
    """17 significant digits for floats, lower-case booleans, empty for missing."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.16e}"
    return str(value)


def _writer(stream: IO[str]):
    return csv.writer(stream, lineterminator="\n")


def _metadata(stream, kind: str, base: SystemParams, spec: SweepSpec, extra: Iterable[str] = ()):
    lines = [f"celsteer {__version__} {kind}"]
    for i, ax in enumerate(spec.axes, 1):
        lines.append(f"axis{i}: {ax.path} min={fmt(ax.min)} max={fmt(ax.max)} "
                     f"n_points={int(ax.n_points)} scale={ax.scale}")
    g = base.gain
    lines.append(f"gain: A={fmt(g.linear_gain_A)} gamma={fmt(g.atomic_decay_gamma)} "
                 f"omega_over_gamma={fmt(g.omega_over_gamma)} (rad/s)")
    for i in (1, 2):
        c, m = base.cavity(i), base.mirror(i)
        coupling = (f"g_over_wm={fmt(c.g_over_wm)}" if c.g_over_wm is not None
                    else f"G={fmt(c.effective_coupling_G)}" if c.effective_coupling_G is not None
                    else "G=from drive")
        bath = (f"n_th={fmt(m.n_th)}" if m.n_th is not None else f"T={fmt(m.temperature)} K")
        lines.append(f"mode {i}: kappa={fmt(c.kappa)} {coupling} omega_m={fmt(m.omega_m)} "
                     f"gamma_m={fmt(m.gamma_m)} {bath}")
    lines.extend(extra)
    for line in lines:
        stream.write(f"# {line}\n")


def write_sweep_csv(stream: IO[str], rows: Sequence[SweepRow], base: SystemParams,
                    spec: SweepSpec) -> None:
    same_w = base.mirror_1.omega_m == base.mirror_2.omega_m
    units = "hbar_wm_over_2" if same_w else "J"
    _metadata(stream, "sweep", base, spec, [f"energy_diff units: {units}",
                                            "steering tolerance: 1e-9"])
    w = _writer(stream)
    w.writerow([a.path for a in spec.axes] + ["stable", "status"] + list(spec.outputs))
    for row in rows:
        w.writerow([fmt(c) for c in row.coords] + [fmt(row.stable), row.status]
                   + [fmt(row.values.get(o)) for o in spec.outputs])


STABILITY_COLUMNS = ("stable_by_eig", "stable_by_rh", "agree", "boundary_band", "max_real_eig",
                     "rh_margin", "time_scale") + tuple(f"lambda_{n}" for n in range(1, 9))


def write_stability_csv(stream: IO[str], rows: Sequence[StabilityRow], base: SystemParams,
                        spec: SweepSpec) -> None:
    _metadata(stream, "stability", base, spec,
              ["lambda_n are Hurwitz minors of K / time_scale"])
    w = _writer(stream)
    w.writerow([a.path for a in spec.axes] + list(STABILITY_COLUMNS))
    for row in rows:
        cells = [fmt(c) for c in row.coords]
        rep = row.report
        if rep is None:
            cells += [""] * len(STABILITY_COLUMNS)
        else:
            cells += [fmt(rep.stable_by_eig), fmt(rep.stable_by_rh), fmt(rep.agree),
                      fmt(rep.in_boundary_band()), fmt(rep.max_real_eig), fmt(rep.rh_margin),
                      fmt(rep.time_scale)] + [fmt(x) for x in rep.hurwitz]
        w.writerow(cells)


def write_matrix_csv(stream: IO[str], m: np.ndarray) -> None:
    w = _writer(stream)
    for r in np.asarray(m):
        w.writerow([fmt(float(x)) for x in r])
