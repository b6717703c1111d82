"""Command-line surface: single-point rates, distance sweeps, and the
maximum secure distance.

Configuration is a flat key-value text file (`key = value`, `#` comments);
CLI flags override file values and `--emit-config` dumps the fully
resolved effective configuration, so every table this tool emits can be
reproduced from one artifact file.  Sweep tables are CSV with a single
`#`-prefixed header line carrying a hash of the effective physics and
search parameters; re-running a command with the same configuration
produces byte-identical output.

Exit codes: 0 success, 1 config/parse error, 2 numerical failure,
3 insecure (zero-rate) result where a rate was requested.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
from dataclasses import dataclass, replace

from .channel import simulate_counts
from .chernoff import ConvergenceError
from .fidelity import VacuousBoundError, virtual_intensities
from .keyrate import bound_phase_flips, leak_ec_bits
from .model import (ChannelParams, EpsilonBudget, ProtocolParams, RatePoint,
                    SourceBounds, ValidationError)
from .optimizer import (NoSecureDistanceError, Scenario, SweepSpec,
                        max_distance, optimize_point, sweep)

LN10 = math.log(10.0)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_INSECURE = 3


class ConfigError(ValueError):
    """Malformed configuration file or command line."""


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved run configuration (defaults follow the reference
    simulation parameters)."""

    # source
    mu_o: float = 1e-8          # non-ideal vacuum intensity (av0 = e^-mu_o)
    mu_e: float = 0.0           # Trojan reflected-light intensity cap
    xi: int = 1                 # trailing vacuum sub-pulses per logical window
    # channel
    distance_km: float = 0.0
    alpha_f: float = 0.2
    eta_d: float = 0.60
    p_d: float = 1e-9
    e_d: float = 0.03
    # protocol
    n_windows: int = 10 ** 14
    f_ec: float = 1.16
    eps_coh: float = 1e-10
    # optimizer grids
    mu_min: float = 1e-4
    mu_max: float = 1.0
    mu_steps: int = 40
    pw_min: float = 0.01
    pw_max: float = 0.6
    pw_steps: int = 30
    refine_iters: int = 3
    # sweep / maxdist
    dist_min: float = 0.0
    dist_max: float = 500.0
    dist_step: float = 5.0
    resolution_km: float = 1.0
    # output routing (not part of the config hash)
    out: str = ""
    format: str = "text"


_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_INT_KEYS = {"xi", "n_windows", "mu_steps", "pw_steps", "refine_iters"}
_STR_KEYS = {"out", "format"}
_UNHASHED_KEYS = ("out", "format")


def _fmt(x) -> str:
    """Serialize one value: floats at 12 significant digits."""
    if isinstance(x, bool):
        raise TypeError("no boolean config values")
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _round12(x: float) -> float:
    return float(format(x, ".12g"))


def _parse_value(key: str, raw: str):
    if key not in _FIELDS:
        raise ConfigError(f"unknown config key: {key!r}")
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    try:
        if key in _INT_KEYS:
            v = float(raw)
            if not v.is_integer():
                raise ValueError
            return int(v)
        return float(raw)
    except ValueError:
        kind = "an integer" if key in _INT_KEYS else "a number"
        raise ConfigError(f"config key {key!r}: expected {kind}, got {raw!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines; `#` starts a comment."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        values[key] = _parse_value(key, raw)
    return values


def load_config(path: str | None = None, overrides: dict | None = None) -> RunConfig:
    """Defaults <- config file <- overrides, with validation."""
    values = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for key, val in (overrides or {}).items():
        if val is None:
            continue
        if key not in _FIELDS:
            raise ConfigError(f"unknown config key: {key!r}")
        values[key] = val
    cfg = RunConfig(**values)
    _validate_config(cfg)
    return cfg


def _validate_config(cfg: RunConfig) -> None:
    try:
        build_scenario(cfg)
        sweep_distances(cfg)
        _sweep_spec(cfg, ())
    except (ValidationError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.resolution_km <= 0.0:
        raise ConfigError("resolution_km must be positive")
    if cfg.format not in ("text", "json"):
        raise ConfigError(f"format must be 'text' or 'json', got {cfg.format!r}")


def config_text(cfg: RunConfig, include_output: bool = True) -> str:
    """Canonical key = value dump; reparses to an equivalent configuration."""
    lines = []
    for f in dataclasses.fields(RunConfig):
        if not include_output and f.name in _UNHASHED_KEYS:
            continue
        lines.append(f"{f.name} = {_fmt(getattr(cfg, f.name))}")
    return "\n".join(lines) + "\n"


def config_hash(cfg: RunConfig) -> str:
    """SHA-256 over the effective physics/search parameters (output routing
    excluded)."""
    return hashlib.sha256(config_text(cfg, include_output=False).encode()).hexdigest()


def build_scenario(cfg: RunConfig) -> Scenario:
    bounds = SourceBounds.from_intensities(mu=0.0, mu_o=cfg.mu_o,
                                           mu_e=cfg.mu_e, xi=cfg.xi)
    chan = ChannelParams(distance_km=cfg.distance_km, alpha_f=cfg.alpha_f,
                         eta_d=cfg.eta_d, p_d=cfg.p_d, e_d=cfg.e_d)
    proto = ProtocolParams(n_windows=cfg.n_windows, p_w=cfg.pw_min,
                           f_ec=cfg.f_ec)
    eps = EpsilonBudget.for_coherent_target(cfg.eps_coh, cfg.n_windows)
    return Scenario(bounds=bounds, chan=chan, proto=proto, eps=eps)


def sweep_distances(cfg: RunConfig) -> tuple[float, ...]:
    if cfg.dist_step <= 0.0:
        raise ConfigError("dist_step must be positive")
    out = []
    k = 0
    while True:
        d = cfg.dist_min + k * cfg.dist_step
        if d > cfg.dist_max * (1.0 + 1e-12):
            break
        out.append(d)
        k += 1
    return tuple(out)


def _sweep_spec(cfg: RunConfig, distances: tuple[float, ...],
                mu_fixed: float | None = None,
                pw_fixed: float | None = None) -> SweepSpec:
    mu_grid = ((mu_fixed, mu_fixed, 1) if mu_fixed is not None
               else (cfg.mu_min, cfg.mu_max, cfg.mu_steps))
    pw_grid = ((pw_fixed, pw_fixed, 1) if pw_fixed is not None
               else (cfg.pw_min, cfg.pw_max, cfg.pw_steps))
    return SweepSpec(distances_km=distances, mu_grid=mu_grid, pw_grid=pw_grid,
                     refine_iters=cfg.refine_iters)


def point_report(cfg: RunConfig, scenario: Scenario, point: RatePoint) -> dict:
    """Machine-readable report for one operating point, with diagnostics."""
    report = {
        "distance_km": _round12(point.distance_km),
        "mu": _round12(point.mu),
        "p_w": _round12(point.p_w),
        "mu_a_virtual": _round12(point.mu_a_virtual),
        "mu_b_virtual": _round12(point.mu_b_virtual),
        "r_col": _round12(point.r_col),
        "r_coh": _round12(point.r_coh),
        "r_phys": _round12(point.r_phys),
        "status": "secure" if point.r_coh > 0.0 else "insecure",
        "note": point.note,
    }
    chan = replace(scenario.chan, distance_km=point.distance_km)
    proto = replace(scenario.proto, p_w=point.p_w)
    try:
        a0 = math.exp(-point.mu)
        bounds = replace(scenario.bounds, a0=a0, b0=a0)
        counts = simulate_counts(chan, proto, point.mu)
        vi = virtual_intensities(bounds)
        pf = bound_phase_flips(counts, proto, vi,
                               log_fp=scenario.eps.log_eps_chernoff)
        report.update({
            "n_o": counts.n_o,
            "n_b": counts.n_b,
            "n_z": counts.n_z,
            "e_z": _round12(counts.e_z),
            "c2_bar": _round12(pf.c2_bar),
            "e_ph_upper": _round12(pf.e_ph_upper),
            "leak_ec_bits": _round12(leak_ec_bits(counts, proto)),
        })
    except (ValidationError, ValueError, VacuousBoundError):
        pass  # diagnostics unavailable for degenerate points
    eps = scenario.eps
    report.update({
        "log10_eps_cor": _round12(eps.log_eps_cor / LN10),
        "log10_eps_pa": _round12(eps.log_eps_pa / LN10),
        "log10_eps_bar": _round12(eps.log_eps_bar / LN10),
        "log10_eps_chernoff": _round12(eps.log_eps_chernoff / LN10),
        "log10_eps_col": _round12(eps.log_eps_col / LN10),
        "log10_eps_coh": _round12(eps.log_eps_coh(cfg.n_windows) / LN10),
    })
    return report


def render_report_text(report: dict) -> str:
    width = max(len(k) for k in report)
    lines = [f"{k.ljust(width)} : {_fmt(v)}" for k, v in report.items()]
    return "\n".join(lines) + "\n"


SWEEP_COLUMNS = ("distance_km", "mu_opt", "pw_opt", "mu_a_virtual",
                 "r_col", "r_coh", "r_phys")


def render_sweep_csv(cfg: RunConfig, points: list[RatePoint]) -> str:
    lines = [f"# config_hash={config_hash(cfg)}", ",".join(SWEEP_COLUMNS)]
    for p in points:
        lines.append(",".join(_fmt(v) for v in (
            p.distance_km, p.mu, p.p_w, p.mu_a_virtual,
            p.r_col, p.r_coh, p.r_phys)))
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_rate(cfg: RunConfig, mu_fixed: float | None = None,
             pw_fixed: float | None = None) -> int:
    scenario = build_scenario(cfg)
    spec = _sweep_spec(cfg, (cfg.distance_km,), mu_fixed, pw_fixed)
    point = optimize_point(spec, scenario, cfg.distance_km)
    report = point_report(cfg, scenario, point)
    if cfg.format == "json":
        _emit(json.dumps(report, indent=2) + "\n", cfg.out)
    else:
        _emit(render_report_text(report), cfg.out)
    return EXIT_OK if point.r_coh > 0.0 else EXIT_INSECURE


def cmd_sweep(cfg: RunConfig) -> int:
    scenario = build_scenario(cfg)
    distances = sweep_distances(cfg)
    spec = _sweep_spec(cfg, distances)
    points = sweep(spec, scenario)
    _emit(render_sweep_csv(cfg, points), cfg.out)
    return EXIT_OK


def cmd_maxdist(cfg: RunConfig) -> int:
    scenario = build_scenario(cfg)
    spec = _sweep_spec(cfg, ())
    dist = max_distance(spec, scenario, cfg.resolution_km)
    _emit(f"max_secure_distance_km = {_fmt(_round12(dist))}\n"
          f"resolution_km = {_fmt(cfg.resolution_km)}\n", cfg.out)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit code 1, not argparse's 2
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="scsqkd",
                     description="Finite-key secure rates for the "
                                 "side-channel-secure QKD protocol.")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="path to a key = value config file")
        p.add_argument("--distance", type=float, dest="distance_km",
                       help="distance in km (rate) override")
        p.add_argument("--mu-o", type=float, dest="mu_o",
                       help="non-ideal vacuum intensity")
        p.add_argument("--mu-e", type=float, dest="mu_e",
                       help="Trojan reflected-light intensity cap")
        p.add_argument("--xi", type=int, help="correlation length")
        p.add_argument("--n-windows", type=lambda s: int(float(s)),
                       dest="n_windows", help="number of logical windows")
        p.add_argument("--out", help="output file (default: stdout)")
        p.add_argument("--emit-config", action="store_true",
                       help="print the resolved effective configuration and exit")

    p_rate = sub.add_parser("rate", help="evaluate one operating point")
    add_common(p_rate)
    p_rate.add_argument("--mu", type=float, help="fix the signal intensity")
    p_rate.add_argument("--pw", type=float, help="fix the send probability")
    p_rate.add_argument("--format", choices=("text", "json"),
                        help="report format")

    p_sweep = sub.add_parser("sweep", help="optimized rate vs distance (CSV)")
    add_common(p_sweep)
    p_sweep.add_argument("--dist-min", type=float, dest="dist_min")
    p_sweep.add_argument("--dist-max", type=float, dest="dist_max")
    p_sweep.add_argument("--dist-step", type=float, dest="dist_step")

    p_max = sub.add_parser("maxdist", help="maximum secure distance")
    add_common(p_max)
    p_max.add_argument("--resolution", type=float, dest="resolution_km",
                       help="bisection resolution in km")

    return parser


_OVERRIDE_KEYS = ("distance_km", "mu_o", "mu_e", "xi", "n_windows", "out",
                  "format", "dist_min", "dist_max", "dist_step",
                  "resolution_km")


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        overrides = {k: getattr(args, k) for k in _OVERRIDE_KEYS
                     if hasattr(args, k)}
        cfg = load_config(args.config, overrides)
        if getattr(args, "emit_config", False):
            sys.stdout.write(config_text(cfg))
            return EXIT_OK
        if args.cmd == "rate":
            return cmd_rate(cfg, mu_fixed=args.mu, pw_fixed=args.pw)
        if args.cmd == "sweep":
            return cmd_sweep(cfg)
        if args.cmd == "maxdist":
            return cmd_maxdist(cfg)
        raise ConfigError(f"unknown command {args.cmd!r}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NoSecureDistanceError as exc:
        print(f"insecure: {exc}", file=sys.stderr)
        return EXIT_INSECURE
    except ConvergenceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValidationError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
