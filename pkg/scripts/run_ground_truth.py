"""Enumerate every built-in environment and print a results table.

    python3 scripts/run_ground_truth.py --cap 100000 --out-dir runs/ground_truth

Writes one trace CSV per environment plus results.csv, then prints the node
and edge branching factors side by side.
"""

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from branchscope.cli import write_trace_csv
from branchscope.enumeration import bfs_enumerate, edge_branching
from branchscope.environments import make_env
from branchscope.estimator import estimate_from_trace
from branchscope.validator import detect_dead_initial, warm_up


@dataclass
class GroundTruthConfig:
    cap: int = 100_000
    workers: int = 1
    out_dir: Path = Path("runs/ground_truth")
    envs: list[tuple[str, dict]] = field(default_factory=lambda: [
        ("uniform_tree", {"b": 1}),
        ("uniform_tree", {"b": 2}),
        ("uniform_tree", {"b": 3}),
        ("uniform_tree", {"b": 5}),
        ("uniform_tree", {"b": 18}),
        ("mod_rotator", {"m": 4}),
        ("mod_rotator", {"m": 64}),
        ("paddle_mini", {}),
        ("freeze_frames", {}),
        ("dead_start", {}),
    ])


def run(cfg: GroundTruthConfig) -> list[dict]:
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, params in cfg.envs:
        env = make_env(name, params)
        steps = warm_up(env).steps if detect_dead_initial(env) else 0
        t0 = time.perf_counter()
        trace = bfs_enumerate(env, cfg.cap, workers=cfg.workers)
        elapsed = time.perf_counter() - t0
        with open(cfg.out_dir / f"{trace.env_name}.csv", "w", newline="") as fh:
            write_trace_csv(trace, fh)
        est = estimate_from_trace(trace)
        rows.append({
            "env": trace.env_name,
            "frames": est.frames,
            "states": est.states,
            "node_b": est.b,
            "edge_b": edge_branching(trace),
            "warmup": steps,
            "seconds": elapsed,
        })
    return rows


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--cap", type=int, default=GroundTruthConfig.cap)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out-dir", type=Path, default=GroundTruthConfig.out_dir)
    args = p.parse_args()
    rows = run(GroundTruthConfig(cap=args.cap, workers=args.workers, out_dir=args.out_dir))

    print(f"{'env':<30} {'frames':>7} {'states':>9} {'node b':>8} {'edge b':>8} {'warmup':>6} {'sec':>6}")
    for r in rows:
        print(f"{r['env']:<30} {r['frames']:>7} {r['states']:>9} {r['node_b']:>8.4f} "
              f"{r['edge_b']:>8.4f} {r['warmup']:>6} {r['seconds']:>6.2f}")


if __name__ == "__main__":
    main()
