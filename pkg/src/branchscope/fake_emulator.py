"""Serve a built-in environment over the adapter line protocol.

    python -m branchscope.fake_emulator mod_rotator m=4

This stands in for a real emulator binding and is what the adapter tests
talk to. Fault switches make it misbehave in controlled ways:

``--glitch-at N``
    The N-th SUCC request over the life of the process answers with a sink
    key (all 0xFF bytes) for every action; the sink is absorbing. The
    request counter is hidden state, so the same question gets a different
    answer depending on history: a replay diverges at frame N, and a second
    enumeration on the same connection disagrees with the first.
``--fault NAME``
    zero-actions: INFO reports 0 actions. short-key: SUCC answers one byte
    short. err: SUCC answers ``ERR``. exit: the process exits on the first
    SUCC. hang: the process never answers SUCC.
"""

from __future__ import annotations

import argparse
import base64
import sys
import time

from .environments import BUILTINS, make_env

FAULTS = ("zero-actions", "short-key", "err", "exit", "hang")


def _b64(key: bytes) -> str:
    return base64.b64encode(key).decode("ascii")


def serve(env, stdin=sys.stdin, stdout=sys.stdout, glitch_at: int = 0,
          fault: str | None = None) -> int:
    desc = env.descriptor
    sink = b"\xff" * desc.state_key_len
    served = 0

    def reply(text: str) -> None:
        stdout.write(text + "\n")
        stdout.flush()

    for line in stdin:
        parts = line.split()
        if not parts:
            continue
        cmd = parts[0]
        if cmd == "INFO":
            n = 0 if fault == "zero-actions" else desc.num_actions
            reply(f"OK {n} {desc.noop_action} {desc.state_key_len}")
        elif cmd == "INIT":
            reply("OK " + _b64(env.initial_state()))
        elif cmd == "SUCC" and len(parts) == 2:
            if fault == "exit":
                return 3
            if fault == "hang":
                time.sleep(3600)
            if fault == "err":
                reply("ERR injected failure")
                continue
            served += 1
            try:
                key = base64.b64decode(parts[1], validate=True)
            except ValueError:
                reply("ERR bad base-64")
                continue
            if glitch_at and (key == sink or served == glitch_at):
                succ = [sink] * desc.num_actions
            else:
                try:
                    succ = env.successors(key)
                except Exception as e:  # noqa: BLE001 - reported over the wire
                    reply(f"ERR {type(e).__name__}")
                    continue
            if fault == "short-key":
                succ = [k[:-1] for k in succ]
            reply("OK " + " ".join(_b64(k) for k in succ))
        elif cmd == "QUIT":
            reply("OK")
            return 0
        else:
            reply("ERR unknown request")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m branchscope.fake_emulator")
    ap.add_argument("env", choices=sorted(BUILTINS))
    ap.add_argument("params", nargs="*", metavar="K=V")
    ap.add_argument("--glitch-at", type=int, default=0, metavar="N")
    ap.add_argument("--fault", choices=FAULTS)
    args = ap.parse_args(argv)
    params = dict(p.split("=", 1) for p in args.params)
    env = make_env(args.env, params)
    return serve(env, glitch_at=args.glitch_at, fault=args.fault)


if __name__ == "__main__":
    sys.exit(main())
