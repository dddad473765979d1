"""Command-line entry point: ``celsteer {point,sweep,stability,oracle}``."""
from __future__ import annotations

import argparse
import contextlib
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._accel import BACKEND
from .config import LoadedConfig, load_config
from .errors import CelsteerError, ConfigError
from .sweep import (ALL_OUTPUTS, Axis, SweepSpec, evaluate_point, fmt, run_stability_map,
                    run_sweep, write_matrix_csv, write_stability_csv, write_sweep_csv)

logger = logging.getLogger("celsteer")

EXIT_OK = 0
EXIT_POINT_FAILED = 1
EXIT_USAGE = 2

# default grid for `stability` when the config has no sweep section
_STABILITY_DEFAULT = SweepSpec(Axis("cavity_2.g_over_wm", 0.0, 0.35, 121),
                               Axis("gain.omega_over_gamma", 0.0, 12.0, 161))


@contextlib.contextmanager
def _open_out(target: str):
    if target == "-":
        yield sys.stdout
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            yield fh


def _parse_axis(text: str) -> Axis:
    parts = text.split(":")
    if len(parts) not in (4, 5):
        raise ConfigError(f"--axis {text!r}: expected path:min:max:n_points[:scale]")
    try:
        lo, hi, n = float(parts[1]), float(parts[2]), int(parts[3])
    except ValueError:
        raise ConfigError(f"--axis {text!r}: min/max must be numbers, n_points an integer") from None
    return Axis(parts[0], lo, hi, n, parts[4] if len(parts) == 5 else "linear")


def _sweep_spec(args, cfg: LoadedConfig, fallback: Optional[SweepSpec]) -> SweepSpec:
    if args.axis:
        if len(args.axis) > 2:
            raise ConfigError("at most two --axis options")
        axes = [_parse_axis(a) for a in args.axis]
        outputs = tuple(args.outputs.split(",")) if args.outputs else ALL_OUTPUTS
        return SweepSpec(axes[0], axes[1] if len(axes) > 1 else None, outputs)
    if cfg.sweep is not None:
        if args.outputs:
            return SweepSpec(cfg.sweep.axis1, cfg.sweep.axis2, tuple(args.outputs.split(",")))
        return cfg.sweep
    if fallback is not None:
        return fallback
    raise ConfigError("no sweep grid: add a 'sweep' section to the config or pass --axis")


def _dump(directory: Path, **mats):
    directory.mkdir(parents=True, exist_ok=True)
    for name, m in mats.items():
        if m is None:
            continue
        with open(directory / f"{name}.csv", "w", encoding="utf-8", newline="\n") as fh:
            write_matrix_csv(fh, m)
    logger.info("matrices written to %s", directory)


def cmd_point(args, cfg: LoadedConfig) -> int:
    ev = evaluate_point(cfg.params)
    row = ev.row
    with _open_out(args.out) as out:
        out.write("stable,status," + ",".join(ALL_OUTPUTS) + "\n")
        out.write(",".join([fmt(row.stable), row.status] + [fmt(row.values.get(o))
                                                            for o in ALL_OUTPUTS]) + "\n")
    if args.dump_matrices:
        _dump(Path(args.dump_matrices), K=ev.k, R=ev.r, V=ev.v)
    if row.status == "error":
        print(f"error: {row.error}", file=sys.stderr)
        return EXIT_POINT_FAILED
    if row.status != "ok":
        print(f"status: {row.status}", file=sys.stderr)
    return EXIT_OK


def _report_failures(errors: Sequence[str]) -> int:
    for e in errors:
        print(f"error: {e}", file=sys.stderr)
    if errors:
        print(f"{len(errors)} point(s) failed", file=sys.stderr)
        return EXIT_POINT_FAILED
    return EXIT_OK


def cmd_sweep(args, cfg: LoadedConfig) -> int:
    spec = _sweep_spec(args, cfg, None)
    rows = run_sweep(cfg.params, spec, workers=args.workers)
    with _open_out(args.out) as out:
        write_sweep_csv(out, rows, cfg.params, spec)
    counts: dict = {}
    for r in rows:
        counts[r.status] = counts.get(r.status, 0) + 1
    print("points: " + ", ".join(f"{k}={v}" for k, v in sorted(counts.items())), file=sys.stderr)
    return _report_failures([r.error for r in rows if r.status == "error"])


def cmd_stability(args, cfg: LoadedConfig) -> int:
    spec = _sweep_spec(args, cfg, _STABILITY_DEFAULT)
    rows = run_stability_map(cfg.params, spec, workers=args.workers)
    with _open_out(args.out) as out:
        write_stability_csv(out, rows, cfg.params, spec)
    reps = [r.report for r in rows if r.report is not None]
    disagree = sum(not r.agree for r in reps)
    outside = sum(not r.agree and not r.in_boundary_band() for r in reps)
    print(f"points: {len(rows)}, stable: {sum(r.stable_by_eig for r in reps)}, "
          f"verdict disagreements: {disagree} ({outside} outside the boundary band)",
          file=sys.stderr)
    return _report_failures([r.error for r in rows if r.error])


def cmd_oracle(args, cfg: LoadedConfig) -> int:
    from .dynamics import solve_lyapunov
    from .oracle import OracleConfig, noise_factor, simulate_covariance

    opts = dict(cfg.oracle or {})
    if args.seed is not None:
        opts["seed"] = args.seed
    if args.trajectories is not None:
        opts["n_trajectories"] = args.trajectories
    if args.steps is not None:
        opts["n_steps"] = args.steps
    try:
        ocfg = OracleConfig(**opts)
    except ValueError as exc:
        raise ConfigError(f"oracle: {exc}") from None
    ev = evaluate_point(cfg.params, outputs=("max_real_eig",))
    if ev.row.status != "ok":
        print(f"error: oracle needs a stable point with PSD diffusion; status is "
              f"{ev.row.status} {ev.row.error or ''}".rstrip(), file=sys.stderr)
        return EXIT_POINT_FAILED
    b = noise_factor(ev.r)
    res = simulate_covariance(ev.k, b, ocfg, workers=args.workers)
    v = solve_lyapunov(ev.k, ev.r)
    rel = float(np.linalg.norm(res.estimate - v) / np.linalg.norm(v))
    with _open_out(args.out) as out:
        out.write(f"# celsteer {__version__} oracle\n")
        out.write(f"# seed={ocfg.seed} n_trajectories={ocfg.n_trajectories} "
                  f"n_steps={res.n_steps} dt={fmt(res.dt)} "
                  f"burn_in_fraction={fmt(ocfg.burn_in_fraction)}\n")
        out.write(f"# relative_frobenius_error={fmt(rel)} "
                  f"relative_stderr={fmt(res.stderr / np.linalg.norm(v))}\n")
        out.write("row,col,estimate,lyapunov,deviation\n")
        for i in range(v.shape[0]):
            for j in range(v.shape[1]):
                out.write(f"{i + 1},{j + 1},{fmt(res.estimate[i, j])},{fmt(v[i, j])},"
                          f"{fmt(res.estimate[i, j] - v[i, j])}\n")
    if args.dump_matrices:
        _dump(Path(args.dump_matrices), K=ev.k, R=ev.r, V=v, B=b, V_mc=res.estimate)
    print(f"relative Frobenius error {rel:.4f} (bootstrap stderr "
          f"{res.stderr / np.linalg.norm(v):.4f})", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON parameter file (defaults if omitted)")
    common.add_argument("--out", default="-", help="output CSV path, '-' for stdout")
    common.add_argument("--workers", type=int, default=1, help="worker processes")
    common.add_argument("-v", "--verbose", action="store_true")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--axis", action="append",
                      help="path:min:max:n_points[:linear|log]; repeat for a 2-D grid")
    grid.add_argument("--outputs", help="comma-separated subset of " + ",".join(ALL_OUTPUTS))

    parser = argparse.ArgumentParser(prog="celsteer", description=__doc__)
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__} ({BACKEND} backend)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("point", parents=[common], help="evaluate one parameter point")
    p.add_argument("--dump-matrices", metavar="DIR", help="write K, R (and V) as CSV to DIR")
    p.set_defaults(func=cmd_point)

    s = sub.add_parser("sweep", parents=[common, grid], help="1-D or 2-D steering sweep")
    s.set_defaults(func=cmd_sweep)

    st = sub.add_parser("stability", parents=[common, grid],
                        help="eigenvalue and Routh-Hurwitz stability map")
    st.set_defaults(func=cmd_stability)

    o = sub.add_parser("oracle", parents=[common], help="Monte Carlo check of the steady state")
    o.add_argument("--seed", type=int, help="64-bit seed")
    o.add_argument("--trajectories", type=int)
    o.add_argument("--steps", type=int)
    o.add_argument("--dump-matrices", metavar="DIR")
    o.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CelsteerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_POINT_FAILED


if __name__ == "__main__":
    sys.exit(main())
