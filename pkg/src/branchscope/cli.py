"""Command-line entry point.

    branchscope enumerate --env uniform_tree --param b=2 --cap 7
    branchscope estimate --states 7 --frames 2
    branchscope validate --all-builtin
    branchscope report --traces runs/ --out results.csv

Exit codes: 0 success, 1 engine/adapter failure or detected mismatch,
2 bad flags or unreadable input.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path
from typing import Sequence

from .core import (
    BadParams,
    BranchscopeError,
    CrossCheckRecord,
    EnumerationTrace,
    InvalidInput,
    UnknownEnv,
)
from .enumeration import edge_branching, enumerate_states
from .environments import BUILTINS, ENV_NAMES, make_env
from .estimator import estimate_branching, estimate_from_trace
from .validator import DEFAULT_WARMUP_STEPS, cross_check, detect_dead_initial, warm_up

log = logging.getLogger("branchscope")

TRACE_HEADER = ["env", "frame", "new_states", "cumulative_states"]
MISMATCH_HEADER = ["env", "states_bfs", "states_id", "frames_bfs", "frames_id",
                   "b_bfs", "b_id", "b_diff"]
RESULTS_HEADER = ["env", "frames", "states", "branching_factor"]


class UsageError(Exception):
    """Bad flags or unreadable input; maps to exit code 2."""


# -- CSV formats ---------------------------------------------------------
def write_trace_csv(trace: EnumerationTrace, stream, env_name: str | None = None) -> None:
    name = env_name or trace.env_name
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(TRACE_HEADER)
    for r in trace.records:
        w.writerow([name, r.frame, r.new_states, r.cumulative_states])


def read_trace_csv(path: Path) -> tuple[str, list[tuple[int, int, int]]]:
    """Return (env name, [(frame, new, cumulative), ...]); UsageError if malformed."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError(f"cannot read trace {path}: {e}") from None
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != TRACE_HEADER:
        raise UsageError(f"{path}: expected header {','.join(TRACE_HEADER)}")
    names, out = set(), []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise UsageError(f"{path}:{n}: expected 4 fields, got {len(row)}")
        try:
            frame, new, cum = (int(x) for x in row[1:])
        except ValueError:
            raise UsageError(f"{path}:{n}: non-integer field") from None
        if frame != len(out) or new < 0 or cum < 1:
            raise UsageError(f"{path}:{n}: bad record {row}")
        names.add(row[0])
        out.append((frame, new, cum))
    if not out:
        raise UsageError(f"{path}: no records")
    if len(names) != 1:
        raise UsageError(f"{path}: mixed env names {sorted(names)}")
    return names.pop(), out


def write_mismatch_csv(records: Sequence[CrossCheckRecord], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(MISMATCH_HEADER)
    for r in sorted(records, key=lambda r: (-r.b_diff, r.traces_match, r.env_name)):
        w.writerow([r.env_name, r.states_bfs, r.states_id, r.frames_bfs, r.frames_id,
                    f"{r.b_bfs:.4f}", f"{r.b_id:.4f}", repr(r.b_diff)])


def write_results_csv(rows: Sequence[tuple[str, int, int, float]], stream) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(RESULTS_HEADER)
    for env, frames, states, b in sorted(rows):
        w.writerow([env, frames, states, f"{b:.4f}"])


# -- helpers -------------------------------------------------------------
def _params(pairs: Sequence[str]) -> dict[str, str]:
    out = {}
    for p in pairs or ():
        k, sep, v = p.partition("=")
        if not sep or not k:
            raise UsageError(f"--param expects K=V, got {p!r}")
        out[k] = v
    return out


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _build_env(name: str, pairs: Sequence[str]):
    try:
        return make_env(name, _params(pairs))
    except (UnknownEnv, BadParams) as e:
        raise UsageError(str(e.args[0] if e.args else e)) from None


def summary_line(trace: EnumerationTrace, name: str) -> str:
    last = trace.final
    parts = [f"{name}: frames={last.frame} states={last.cumulative_states}"]
    if len(trace.records) >= 2:
        parts.append(f"b={estimate_from_trace(trace).b:.4f}")
    else:
        parts.append("b=n/a")
    if trace.expanded_states:
        parts.append(f"edge_b={edge_branching(trace):.4f}")
    parts.append(f"({trace.terminated_by.value})")
    return " ".join(parts)


# -- subcommands -----------------------------------------------------------
def cmd_enumerate(args) -> int:
    env = _build_env(args.env, args.param)
    with env:
        name = args.label or env.descriptor.name
        dead = detect_dead_initial(env)
        meta = ""
        if dead and args.warmup:
            w = warm_up(env, args.warmup_steps)
            meta = f" warmup_steps={w.steps} root={w.root.hex()}"
        elif dead:
            print(f"warning: dead initial state detected in {name}; "
                  "rerun with --warmup", file=sys.stderr)
        trace = enumerate_states(env, args.cap, engine=args.engine, workers=args.workers)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_trace_csv(trace, fh, name)
        out = sys.stdout
    else:
        write_trace_csv(trace, sys.stdout, name)
        out = sys.stderr
    print(summary_line(trace, name) + meta, file=out)
    return 1 if dead and not args.warmup else 0


def cmd_estimate(args) -> int:
    if args.trace:
        _, rows = read_trace_csv(args.trace)
        frame, _, states = rows[-1]
    elif args.states is not None and args.frames is not None:
        states, frame = args.states, args.frames
    else:
        raise UsageError("give either --trace or both --states and --frames")
    if states < 1 or frame < 1:
        raise UsageError(f"need states >= 1 and frames >= 1, got {states}, {frame}")
    print(f"b={estimate_branching(states, frame).b:.4f}")
    return 0


def cmd_validate(args) -> int:
    if args.all_builtin:
        envs = [make_env(n) for n in BUILTINS]
    elif args.env:
        envs = [_build_env(args.env, args.param)]
    else:
        raise UsageError("give --env NAME or --all-builtin")
    records = []
    for env in envs:
        with env:
            records.append(cross_check(env, args.cap))
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_mismatch_csv(records, fh)
    else:
        write_mismatch_csv(records, sys.stdout)
    bad = [r.env_name for r in records if not r.agrees]
    if bad:
        print(f"BFS/ID mismatch in {len(bad)} of {len(records)}: {', '.join(bad)}",
              file=sys.stderr)
        return 1
    return 0


def cmd_report(args) -> int:
    root = Path(args.traces)
    if not root.is_dir():
        raise UsageError(f"{root} is not a directory")
    paths = sorted(root.glob("*.csv"))
    if not paths:
        raise UsageError(f"no trace CSVs in {root}")
    rows = []
    for path in paths:
        env, recs = read_trace_csv(path)
        if len(recs) < 2:
            print(f"warning: {path.name} has only the root record; skipped", file=sys.stderr)
            continue
        frame, _, states = recs[-1]
        rows.append((env, frame, states, estimate_branching(states, frame).b))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        write_results_csv(rows, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="branchscope",
                                 description="Estimate average node branching factors "
                                             "by exhaustive state enumeration.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", help="count distinct states per frame")
    p.add_argument("--env", required=True, choices=ENV_NAMES)
    p.add_argument("--param", action="append", default=[], metavar="K=V")
    p.add_argument("--cap", required=True, type=_positive)
    p.add_argument("--engine", choices=("bfs", "id"), default="bfs")
    p.add_argument("--warmup", action="store_true", help="step past a dead initial state")
    p.add_argument("--warmup-steps", type=_positive, default=DEFAULT_WARMUP_STEPS)
    p.add_argument("--out", help="trace CSV path (default: stdout)")
    p.add_argument("--workers", type=_positive, default=1)
    p.add_argument("--label", help="env name written to the CSV")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("estimate", help="branching factor from a state count")
    p.add_argument("--states", type=int)
    p.add_argument("--frames", type=int)
    p.add_argument("--trace", help="trace CSV; its final row is used")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("validate", help="cross-check BFS against iterative deepening")
    p.add_argument("--env", choices=ENV_NAMES)
    p.add_argument("--param", action="append", default=[], metavar="K=V")
    p.add_argument("--all-builtin", action="store_true")
    p.add_argument("--cap", type=_positive, default=10_000)
    p.add_argument("--out", help="mismatch CSV path (default: stdout)")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("report", help="aggregate trace CSVs into a results table")
    p.add_argument("--traces", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidInput) as e:
        print(f"branchscope: error: {e}", file=sys.stderr)
        return 2
    except BranchscopeError as e:
        print(f"branchscope: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
