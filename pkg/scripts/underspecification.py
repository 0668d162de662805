"""How much state hides outside memory: paddle position on vs off the key.

Sweeps the paddle range and compares the distinct-state count with the
controller byte in the key against the count from the memory byte alone.
"""

import argparse
from dataclasses import dataclass

from branchscope.enumeration import bfs_enumerate
from branchscope.environments import PaddleMini
from branchscope.estimator import estimate_from_trace


@dataclass
class SweepConfig:
    period: int = 8
    max_hi: int = 15
    delta: int = 1
    cap: int = 1_000_000


def sweep(cfg: SweepConfig):
    for hi in range(1, cfg.max_hi + 1):
        env = PaddleMini(period=cfg.period, lo=0, hi=hi, start=hi // 2, delta=cfg.delta)
        full = bfs_enumerate(env, cfg.cap)
        core = bfs_enumerate(env, cfg.cap, key=PaddleMini.core_only_key)
        yield hi, full, core


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--period", type=int, default=SweepConfig.period)
    p.add_argument("--max-hi", type=int, default=SweepConfig.max_hi)
    p.add_argument("--delta", type=int, default=SweepConfig.delta)
    args = p.parse_args()
    cfg = SweepConfig(period=args.period, max_hi=args.max_hi, delta=args.delta)

    print(f"{'positions':>9} {'full':>6} {'core':>5} {'ratio':>6} {'b full':>7} {'b core':>7}")
    for hi, full, core in sweep(cfg):
        s_full, s_core = full.final.cumulative_states, core.final.cumulative_states
        b_full = estimate_from_trace(full).b
        b_core = estimate_from_trace(core).b
        print(f"{hi + 1:>9} {s_full:>6} {s_core:>5} {s_full / s_core:>6.1f} "
              f"{b_full:>7.4f} {b_core:>7.4f}")


if __name__ == "__main__":
    main()
