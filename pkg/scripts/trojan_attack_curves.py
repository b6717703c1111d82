#!/usr/bin/env python3
"""Distance sweeps under Trojan-horse back-reflection bounds.

Emits one CSV per curve into --outdir:

  no_attack_perfect_vacuum.csv   mu_E = 0 reference with ideal vacuum
  trojan_mu_e_0.csv              mu_E = 0, vacuum intensity 1e-8
  trojan_mu_e_1e-6.csv           mu_E = 1e-6, vacuum intensity 1e-8
  trojan_mu_e_1e-4.csv           mu_E = 1e-4, vacuum intensity 1e-8

All curves use xi = 1 (one trailing vacuum sub-pulse per logical window);
rates are per physical window.
"""

import argparse
import sys
from pathlib import Path

try:
    import scsqkd  # noqa: F401
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from scsqkd.cli import RunConfig, build_scenario, render_sweep_csv, sweep_distances
from scsqkd.optimizer import SweepSpec, sweep


def run_curve(name: str, cfg: RunConfig, outdir: Path, workers: int) -> None:
    spec = SweepSpec(distances_km=sweep_distances(cfg),
                     mu_grid=(cfg.mu_min, cfg.mu_max, cfg.mu_steps),
                     pw_grid=(cfg.pw_min, cfg.pw_max, cfg.pw_steps),
                     refine_iters=cfg.refine_iters)
    points = sweep(spec, build_scenario(cfg), workers=workers)
    path = outdir / f"{name}.csv"
    path.write_text(render_sweep_csv(cfg, points), encoding="utf-8")
    secure = [p for p in points if p.r_phys > 0.0]
    edge = f"{secure[-1].distance_km:g} km" if secure else "none"
    print(f"{path}  ({len(points)} rows, last secure point {edge})")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--outdir", default="curves_trojan")
    ap.add_argument("--dist-max", type=float, default=260.0)
    ap.add_argument("--dist-step", type=float, default=5.0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    base = dict(xi=1, dist_min=0.0, dist_max=args.dist_max,
                dist_step=args.dist_step)

    run_curve("no_attack_perfect_vacuum",
              RunConfig(mu_o=0.0, mu_e=0.0, **base), outdir, args.workers)
    run_curve("trojan_mu_e_0",
              RunConfig(mu_o=1e-8, mu_e=0.0, **base), outdir, args.workers)
    run_curve("trojan_mu_e_1e-6",
              RunConfig(mu_o=1e-8, mu_e=1e-6, **base), outdir, args.workers)
    run_curve("trojan_mu_e_1e-4",
              RunConfig(mu_o=1e-8, mu_e=1e-4, **base), outdir, args.workers)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
