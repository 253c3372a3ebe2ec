"""Command-line front end: ``dribblekit {simulate,batch,filter-bench,stability}``."""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .ball_dynamics import TerrainParams, classify_stability, eigenvalues
from .errors import ConfigError, DribbleError, SimulationDivergedError
from .sim import bench
from .sim.config import Controller, EventSwitches, ScenarioConfig, load_config
from .sim.randomization import sample_randomization
from .sim.runner import run_scenario, write_outputs

BUCKETS = (("low", -0.1, 0.1), ("mid", 0.1, 0.3), ("high", 0.3, 0.5))
_CONTROLLERS = {"feedback": Controller.FEEDBACK_GUIDED, "naive": Controller.NAIVE_PURSUIT}


class UsageError(Exception):
    pass


def bucket_of(c_d: float) -> str | None:
    """Drag bucket name; the last bucket is closed on the right."""
    for name, lo, hi in BUCKETS:
        if lo <= c_d < hi or (name == "high" and c_d == hi):
            return name
    return None


def _seed_override() -> int | None:
    raw = os.environ.get("SEED_OVERRIDE")
    if raw is None or raw == "":
        return None
    try:
        seed = int(raw)
    except ValueError:
        raise UsageError(f"SEED_OVERRIDE must be an integer, got {raw!r}") from None
    if not 0 <= seed < 2**64:
        raise UsageError("SEED_OVERRIDE must lie in [0, 2^64)")
    return seed


def _load(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    if getattr(args, "controller", None):
        cfg = replace(cfg, controller=_CONTROLLERS[args.controller])
    if getattr(args, "drag", None) is not None:
        cfg = replace(cfg, terrain=TerrainParams(args.drag, cfg.terrain.ball_mass),
                      events=replace(cfg.events, terrain=False))
    return cfg


def cmd_simulate(args) -> int:
    cfg = _load(args)
    seed = _seed_override()
    if seed is not None:
        cfg = replace(cfg, seed=seed)
    result = run_scenario(cfg)
    csv_path, json_path = write_outputs(result, args.out)
    m = result.metrics
    print(f"ate={m.ate:.4f} success={m.success} max_ball_dist={m.max_ball_dist:.3f} -> {csv_path}, {json_path}")
    return 0


def _stats(values: list[float]) -> dict:
    if not values:
        return {"count": 0, "median": None, "q1": None, "q3": None}
    q1, med, q3 = np.percentile(values, [25, 50, 75])
    return {"count": len(values), "median": float(med), "q1": float(q1), "q3": float(q3)}


def run_batch(cfg: ScenarioConfig, seeds: Sequence[int], controllers: Sequence[Controller],
              fixed_drag: bool) -> tuple[dict, list[dict]]:
    """Run every (controller, seed) pair; returns (report, per-run rows)."""
    if not fixed_drag:
        cfg = replace(cfg, events=replace(cfg.events, terrain=True))
    rows: list[dict] = []
    for ctrl in controllers:
        for seed in seeds:
            run_cfg = replace(cfg, controller=ctrl, seed=seed)
            c_d = cfg.terrain.drag_coefficient if fixed_drag else \
                sample_randomization(cfg.ranges, seed).terrain.drag_coefficient
            row = {"controller": ctrl.value, "seed": seed, "c_d": c_d, "bucket": bucket_of(c_d)}
            try:
                m = run_scenario(run_cfg).metrics
                row.update(status="ok", ate=m.ate, success=m.success,
                           time_to_stop=m.time_to_stop, max_ball_dist=m.max_ball_dist)
            except SimulationDivergedError as e:
                row.update(status=f"diverged at step {e.step}", ate=None, success=False,
                           time_to_stop=None, max_ball_dist=None)
            rows.append(row)

    report: dict = {
        "run_count": len(rows),
        "seed_range": [min(seeds), max(seeds)] if seeds else None,
        "drag": cfg.terrain.drag_coefficient if fixed_drag else "randomized",
        "controllers": {},
    }
    for ctrl in controllers:
        mine = [r for r in rows if r["controller"] == ctrl.value]
        per_bucket = {}
        for name, lo, hi in BUCKETS:
            sel = [r for r in mine if r["bucket"] == name]
            entry = _stats([r["ate"] for r in sel if r["ate"] is not None])
            entry["range"] = [lo, hi]
            entry["runs"] = len(sel)
            entry["success_rate"] = (sum(r["success"] for r in sel) / len(sel)) if sel else None
            per_bucket[name] = entry
        overall = _stats([r["ate"] for r in mine if r["ate"] is not None])
        overall["success_rate"] = sum(r["success"] for r in mine) / len(mine) if mine else None
        report["controllers"][ctrl.value] = {"buckets": per_bucket, "overall": overall}
    if len(rows) == 1:
        r = rows[0]
        report["single_run"] = {k: r[k] for k in ("ate", "success", "time_to_stop", "max_ball_dist", "seed")}
    return report, rows


def cmd_batch(args) -> int:
    if args.seeds < 1:
        raise UsageError("--seeds must be at least 1")
    cfg = _load(args)
    seed = _seed_override()
    seeds = [seed] if seed is not None else list(range(args.seeds))
    controllers = [_CONTROLLERS[args.controller]] if args.controller else list(_CONTROLLERS.values())
    report, rows = run_batch(cfg, seeds, controllers, fixed_drag=args.drag is not None)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    with open(out / "runs.csv", "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    for name, block in report["controllers"].items():
        parts = []
        for b, e in block["buckets"].items():
            if e["runs"]:
                parts.append(f"{b}: median ATE {e['median']:.3f}, success {e['success_rate']:.2f} (n={e['runs']})")
        print(f"{name}: " + "; ".join(parts))
    return 0


def cmd_filter_bench(args) -> int:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    bcfg = bench.BenchConfig(
        arrival_rate=cfg.sensors.arrival_rate, pixel_noise=cfg.sensors.pixel_noise,
        body_height=cfg.sensors.body_height,
    )
    if args.noiseless:
        bcfg = bcfg.noiseless()
    seed = _seed_override()
    seeds = [seed] if seed is not None else list(range(args.seeds))
    reports = [bench.filter_bench(s, bcfg) for s in seeds]
    wins = sum(r.fused_rmse < r.best_slot_rmse for r in reports)
    summary = {
        "seeds": len(reports),
        "fused_rmse_median": float(np.median([r.fused_rmse for r in reports])),
        "best_slot_rmse_median": float(np.median([r.best_slot_rmse for r in reports])),
        "fused_beats_best_slot": wins / len(reports),
        "max_trace_p": max(r.max_trace_p for r in reports),
        "runs": [r.to_dict() for r in reports],
    }
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "filter_bench.json").write_text(json.dumps(summary, indent=2) + "\n")
    print(f"fused RMSE {summary['fused_rmse_median']:.4f} m vs best slot {summary['best_slot_rmse_median']:.4f} m "
          f"(median); fused wins in {wins}/{len(reports)} seeds; max trace(P) {summary['max_trace_p']:.3f}")
    return 0


def _fmt(x: float) -> str:
    return f"{x:g}"


def stability_line(c_d: float) -> str:
    lam = eigenvalues(c_d)
    return f"{classify_stability(c_d).value}, eigenvalues {', '.join(_fmt(v) for v in lam)}"


def cmd_stability(args) -> int:
    print(stability_line(args.c_d))
    return 0


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dribblekit", description="Planar ball-dribbling simulator and tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_required=True):
        sp.add_argument("--config", help="scenario YAML file (defaults built in)")
        sp.add_argument("--out", required=out_required, help="output directory")
        sp.add_argument("--controller", choices=sorted(_CONTROLLERS))
        sp.add_argument("--drag", type=_finite_float, help="override C_D")

    s = sub.add_parser("simulate", help="run one scenario, write trajectory CSV and metrics JSON")
    common(s)
    s.set_defaults(func=cmd_simulate)

    b = sub.add_parser("batch", help="run many seeds and aggregate ATE per drag bucket")
    common(b)
    b.add_argument("--seeds", type=int, default=200)
    b.set_defaults(func=cmd_batch)

    f = sub.add_parser("filter-bench", help="filter RMSE against raw readings on a prescribed path")
    f.add_argument("--config")
    f.add_argument("--out")
    f.add_argument("--seeds", type=int, default=100)
    f.add_argument("--noiseless", action="store_true")
    f.set_defaults(func=cmd_filter_bench)

    st = sub.add_parser("stability", help="classify a drag coefficient")
    st.add_argument("c_d", type=_finite_float)
    st.set_defaults(func=cmd_stability)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except SimulationDivergedError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except DribbleError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
