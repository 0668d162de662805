"""Exhaustive layered enumeration of distinct reachable states.

Both engines report, per frame, how many states have that frame as their
minimal depth. A frame is always expanded completely before the cap is
tested, so the final cumulative count may overshoot the cap.
"""

from __future__ import annotations

import hashlib
import math
import os
import pickle
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable

from .core import (
    CapacityExceeded,
    EmptyTrace,
    EnumerationRecord,
    EnumerationTrace,
    Environment,
    InvalidInput,
    StateKey,
    Termination,
)

MEM_LIMIT_ENV = "BRANCHSCOPE_MEM_LIMIT_MB"
# 2 million keys of up to 136 bytes (128 bytes of RAM plus controller bytes)
DEFAULT_BUDGET_BYTES = 2_000_000 * 136
FINGERPRINT_BYTES = 16
# below this frontier size the pool is not worth the pickling
PARALLEL_MIN_FRONTIER = 4096


def default_budget() -> int:
    """Seen-set budget in key bytes, honouring ``BRANCHSCOPE_MEM_LIMIT_MB``."""
    raw = os.environ.get(MEM_LIMIT_ENV)
    if raw:
        try:
            mb = float(raw)
        except ValueError:
            raise InvalidInput(f"{MEM_LIMIT_ENV}={raw!r} is not a number") from None
        return int(mb * 1024 * 1024)
    return DEFAULT_BUDGET_BYTES


def fingerprint(key: StateKey) -> bytes:
    return hashlib.blake2b(key, digest_size=FINGERPRINT_BYTES).digest()


class SeenSet:
    """Set of state keys with a hard budget on stored key bytes.

    With ``fingerprint=True`` only a 128-bit hash of each key is kept. That
    trades exactness for memory and must stay off when counts have to be
    exact.
    """

    def __init__(self, budget_bytes: int | None = None, fingerprint: bool = False):
        self.budget_bytes = default_budget() if budget_bytes is None else budget_bytes
        self.fingerprint = fingerprint
        self._keys: set[bytes] = set()
        self.bytes_used = 0

    def _stored(self, key: StateKey) -> bytes:
        return fingerprint(key) if self.fingerprint else key

    def add(self, key: StateKey) -> bool:
        """Insert ``key``; return True if it was not present before."""
        k = self._stored(key)
        if k in self._keys:
            return False
        if self.bytes_used + len(k) > self.budget_bytes:
            raise CapacityExceeded(
                f"seen-set budget of {self.budget_bytes} bytes exhausted at "
                f"{len(self._keys)} keys (set {MEM_LIMIT_ENV} to raise it)"
            )
        self._keys.add(k)
        self.bytes_used += len(k)
        return True

    def __contains__(self, key: StateKey) -> bool:
        return self._stored(key) in self._keys

    def __len__(self) -> int:
        return len(self._keys)

    @property
    def count(self) -> int:
        return len(self._keys)


# -- worker side of parallel expansion ------------------------------------
_worker_env: Environment | None = None


def _init_worker(env: Environment) -> None:
    global _worker_env
    # a forked child inherits the parent's object as-is; the round trip
    # gives adapters a private subprocess and reader thread
    _worker_env = pickle.loads(pickle.dumps(env))


def _expand_chunk(chunk: list[StateKey]) -> tuple[list[list[StateKey]], list[int]]:
    env = _worker_env
    succs = [env.successors(k) for k in chunk]
    return succs, [len(set(s)) for s in succs]


def _chunks(items: list, n: int) -> Iterable[list]:
    size = max(1, math.ceil(len(items) / n))
    for i in range(0, len(items), size):
        yield items[i:i + size]


def bfs_enumerate(
    env: Environment,
    cap: int,
    *,
    workers: int = 1,
    budget_bytes: int | None = None,
    fingerprint: bool = False,
    key: Callable[[StateKey], bytes] | None = None,
) -> EnumerationTrace:
    """Breadth-first count of distinct states per frame.

    Stops after the first fully expanded frame whose cumulative count is at
    least ``cap`` (CAP_REACHED) or that adds no new state
    (FRONTIER_EXHAUSTED). ``key`` optionally maps a full state key to the
    identity used for deduplication, e.g. to count states the way a
    memory-only key would; the frontier still holds full keys.

    With ``workers > 1`` large frontiers are expanded in a process pool.
    Results are merged in frontier order, so the trace does not depend on
    the worker count.
    """
    if cap < 1:
        raise InvalidInput(f"cap must be >= 1, got {cap}")
    if workers < 1:
        raise InvalidInput(f"workers must be >= 1, got {workers}")
    ident = key or (lambda k: k)
    seen = SeenSet(budget_bytes, fingerprint=fingerprint)
    num_actions = env.num_actions

    root = env.initial_state()
    seen.add(ident(root))
    records = [EnumerationRecord(0, 1, 1)]
    moves = distinct = expanded = 0
    cumulative = 1
    frontier = [root]
    terminated = Termination.CAP_REACHED if cumulative >= cap else None

    pool = None
    try:
        frame = 0
        while terminated is None:
            frame += 1
            nxt: list[StateKey] = []
            if workers > 1 and len(frontier) >= PARALLEL_MIN_FRONTIER:
                if pool is None:
                    pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(env,))
                batches = pool.map(_expand_chunk, _chunks(frontier, workers * 4))
            else:
                succs = [env.successors(k) for k in frontier]
                batches = [(succs, None)]
            for succs, counts in batches:
                for i, children in enumerate(succs):
                    if key is None and counts is not None:
                        distinct += counts[i]
                    else:
                        distinct += len({ident(c) for c in children})
                    for child in children:
                        if seen.add(ident(child)):
                            nxt.append(child)
            moves += num_actions * len(frontier)
            expanded += len(frontier)
            cumulative += len(nxt)
            records.append(EnumerationRecord(frame, len(nxt), cumulative))
            if not nxt:
                terminated = Termination.FRONTIER_EXHAUSTED
            elif cumulative >= cap:
                terminated = Termination.CAP_REACHED
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()

    return EnumerationTrace(
        records=records,
        edge_move_count=moves,
        edge_distinct_count=distinct,
        terminated_by=terminated,
        env_name=env.descriptor.name,
        expanded_states=expanded,
    )


def id_enumerate(
    env: Environment,
    cap: int,
    *,
    budget_bytes: int | None = None,
) -> EnumerationTrace:
    """Iterative-deepening count of distinct states per frame.

    Each depth limit runs a fresh depth-first traversal from the root with
    its own table of best-known depths. A key is re-expanded only when it is
    reached by a strictly shallower path, which both stops cycles and makes
    the final table hold exact minimal depths. States whose minimal depth
    equals the limit are that frame's new states.
    """
    if cap < 1:
        raise InvalidInput(f"cap must be >= 1, got {cap}")
    budget = default_budget() if budget_bytes is None else budget_bytes
    num_actions = env.num_actions
    root = env.initial_state()
    records = [EnumerationRecord(0, 1, 1)]
    moves = distinct = expanded = 0
    terminated = Termination.CAP_REACHED if cap <= 1 else None

    limit = 0
    while terminated is None:
        limit += 1
        depth: dict[StateKey, int] = {}
        # distinct-successor count of keys expanded at depth limit - 1
        edge_at: dict[StateKey, int] = {}
        stored = 0
        stack = [(root, 0)]
        while stack:
            k, d = stack.pop()
            best = depth.get(k)
            if best is not None and best <= d:
                continue
            if best is None:
                stored += len(k)
                if stored > budget:
                    raise CapacityExceeded(
                        f"depth table budget of {budget} bytes exhausted at limit {limit}"
                    )
            depth[k] = d
            if d < limit:
                children = env.successors(k)
                if d == limit - 1:
                    edge_at[k] = len(set(children))
                nd = d + 1
                for c in reversed(children):
                    cb = depth.get(c)
                    if cb is None or cb > nd:
                        stack.append((c, nd))
        new = 0
        frontier_size = 0
        for k, d in depth.items():
            if d == limit:
                new += 1
            elif d == limit - 1:
                frontier_size += 1
                distinct += edge_at[k]
        moves += num_actions * frontier_size
        expanded += frontier_size
        cumulative = len(depth)
        records.append(EnumerationRecord(limit, new, cumulative))
        if new == 0:
            terminated = Termination.FRONTIER_EXHAUSTED
        elif cumulative >= cap:
            terminated = Termination.CAP_REACHED

    return EnumerationTrace(
        records=records,
        edge_move_count=moves,
        edge_distinct_count=distinct,
        terminated_by=terminated,
        env_name=env.descriptor.name,
        expanded_states=expanded,
    )


def enumerate_states(env: Environment, cap: int, engine: str = "bfs", **kw) -> EnumerationTrace:
    if engine == "bfs":
        return bfs_enumerate(env, cap, **kw)
    if engine == "id":
        kw.pop("workers", None)
        return id_enumerate(env, cap, **kw)
    raise InvalidInput(f"unknown engine {engine!r}")


def edge_branching(trace: EnumerationTrace) -> float:
    """Average number of distinct successors per expanded state."""
    if trace.expanded_states == 0 or trace.edge_move_count == 0:
        raise EmptyTrace("no state was expanded")
    return trace.edge_distinct_count / trace.expanded_states
