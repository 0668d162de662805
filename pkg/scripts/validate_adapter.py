"""Run the determinism probe and BFS/ID cross-check against an adapter.

    python3 scripts/validate_adapter.py "python3 -m branchscope.fake_emulator mod_rotator --glitch-at 3"

Exits 1 if either check finds the emulator nondeterministic.
"""

import argparse
import sys

from branchscope.environments import adapter_connect
from branchscope.validator import cross_check, determinism_probe


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("cmd")
    p.add_argument("--cap", type=int, default=10_000)
    p.add_argument("--probe-length", type=int, default=200)
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    with adapter_connect(args.cmd) as env:
        probe = determinism_probe(env, args.probe_length, trials=args.trials, seed=args.seed)
    print("probe:", probe.describe())
    with adapter_connect(args.cmd) as env:
        check = cross_check(env, args.cap)
    print(f"cross-check: bfs {check.states_bfs} states / {check.frames_bfs} frames, "
          f"id {check.states_id} / {check.frames_id}, b_diff={check.b_diff:.6f}")
    sys.exit(0 if probe and check.agrees else 1)


if __name__ == "__main__":
    main()
