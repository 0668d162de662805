"""Client side of the line protocol spoken by external emulators.

One request per line on the child's stdin, one reply per line on its stdout:

    INFO             -> OK <num_actions> <noop_index> <state_len_bytes>
    INIT             -> OK <state_b64>
    SUCC <state_b64> -> OK <s0_b64> ... <s(A-1)_b64>
    QUIT             -> OK   (then the child exits)

Anything else, including ``ERR <msg>``, is an AdapterFailure.
"""

from __future__ import annotations

import base64
import binascii
import queue
import shlex
import subprocess
import threading
from typing import Sequence

from ..core import (
    AdapterFailure,
    BadParams,
    EnvDescriptor,
    Environment,
    StateKey,
)

DEFAULT_TIMEOUT = 10.0


def encode_key(key: StateKey) -> str:
    return base64.b64encode(key).decode("ascii")


def decode_key(token: str) -> StateKey:
    try:
        return base64.b64decode(token, validate=True)
    except (binascii.Error, ValueError) as e:
        raise AdapterFailure(f"bad base-64 state {token!r}: {e}") from None


class AdapterEnv(Environment):
    """Environment proxied over a subprocess.

    Successor replies are cached per key, so the child is asked about each
    state at most once per connection. Pickling keeps only the command and
    root; an unpickled copy launches its own child, so every worker process
    gets a private subprocess.
    """

    def __init__(self, command: str | Sequence[str], timeout: float = DEFAULT_TIMEOUT,
                 name: str = "adapter"):
        super().__init__()
        self.command = shlex.split(command) if isinstance(command, str) else list(command)
        if not self.command:
            raise BadParams("adapter needs a non-empty command")
        self.timeout = timeout
        self.name = name
        self._proc: subprocess.Popen | None = None
        self._lines: queue.Queue = queue.Queue()
        self._cache: dict[StateKey, list[StateKey]] = {}
        self._init_key: StateKey | None = None
        self.requests = 0
        self._connect()

    # -- process plumbing -------------------------------------------------
    def _connect(self) -> None:
        try:
            self._proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                encoding="ascii",
                bufsize=1,
            )
        except OSError as e:
            raise AdapterFailure(f"cannot launch {self.command!r}: {e}") from e
        self._lines = queue.Queue()
        threading.Thread(target=self._pump, args=(self._proc.stdout, self._lines),
                         daemon=True).start()
        fields = self._request("INFO")
        if len(fields) != 3:
            raise AdapterFailure(f"INFO reply needs 3 fields, got {fields!r}")
        try:
            num_actions, noop, key_len = (int(x) for x in fields)
        except ValueError:
            raise AdapterFailure(f"non-integer INFO reply {fields!r}") from None
        try:
            self.descriptor = EnvDescriptor(
                name=self.name,
                num_actions=num_actions,
                noop_action=noop,
                state_key_len=key_len,
            )
        except BadParams as e:
            self.close()
            raise AdapterFailure(f"invalid descriptor from adapter: {e}") from None

    @staticmethod
    def _pump(stream, lines: queue.Queue) -> None:
        for line in stream:
            lines.put(line)
        lines.put(None)

    def _request(self, line: str) -> list[str]:
        proc = self._proc
        if proc is None:
            self._connect()
            proc = self._proc
        try:
            proc.stdin.write(line + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError, ValueError) as e:
            raise AdapterFailure(f"adapter exited: {e}") from None
        self.requests += 1
        try:
            reply = self._lines.get(timeout=self.timeout)
        except queue.Empty:
            self._kill()
            raise AdapterFailure(f"no reply to {line.split()[0]} within {self.timeout}s") from None
        if reply is None:
            raise AdapterFailure(f"adapter exited with code {proc.poll()}")
        parts = reply.split()
        if not parts or parts[0] != "OK":
            raise AdapterFailure(f"adapter replied {reply.strip()!r} to {line.split()[0]}")
        return parts[1:]

    def _kill(self) -> None:
        if self._proc is not None:
            self._proc.kill()
            self._proc.wait()
            self._proc = None

    def close(self) -> None:
        proc = self._proc
        if proc is None:
            return
        self._proc = None
        try:
            proc.stdin.write("QUIT\n")
            proc.stdin.flush()
            proc.stdin.close()
            proc.wait(timeout=self.timeout)
        except (OSError, ValueError, subprocess.TimeoutExpired):
            proc.kill()
            proc.wait()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def __getstate__(self):
        return {
            "command": self.command,
            "timeout": self.timeout,
            "name": self.name,
            "root": self._root_override,
        }

    def __setstate__(self, state):
        Environment.__init__(self)
        self.command = state["command"]
        self.timeout = state["timeout"]
        self.name = state["name"]
        self._proc = None
        self._cache = {}
        self._init_key = None
        self.requests = 0
        self._connect()
        self._root_override = state["root"]

    def clear_cache(self) -> None:
        self._cache.clear()

    # -- environment contract --------------------------------------------
    def _root(self) -> StateKey:
        if self._init_key is None:
            fields = self._request("INIT")
            if len(fields) != 1:
                raise AdapterFailure(f"INIT reply needs 1 field, got {len(fields)}")
            self._init_key = self.check_key(decode_key(fields[0]))
        return self._init_key

    def _query(self, state: StateKey) -> list[StateKey]:
        fields = self._request("SUCC " + encode_key(state))
        if len(fields) != self.descriptor.num_actions:
            raise AdapterFailure(
                f"SUCC reply has {len(fields)} states, expected {self.descriptor.num_actions}"
            )
        return [self.check_key(decode_key(tok)) for tok in fields]

    def _successors(self, state: StateKey) -> list[StateKey]:
        out = self._cache.get(state)
        if out is None:
            out = self._query(state)
            self._cache[state] = out
        return out

    def replay_successors(self, state: StateKey) -> list[StateKey]:
        self.check_key(state)
        return self._query(state)


def adapter_connect(command: str | Sequence[str], timeout: float = DEFAULT_TIMEOUT,
                    name: str = "adapter") -> AdapterEnv:
    return AdapterEnv(command, timeout=timeout, name=name)

