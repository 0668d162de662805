"""Reproducibility checks: BFS/ID cross-check, replay determinism, dead roots."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .core import (
    CrossCheckRecord,
    EnumerationTrace,
    Environment,
    InvalidInput,
    StateKey,
    StillDead,
)
from .enumeration import bfs_enumerate, id_enumerate
from .estimator import estimate_from_trace

DEFAULT_WARMUP_STEPS = 100


def _b(trace: EnumerationTrace) -> float:
    # a root-only trace (cap 1) shows no growth at all
    if len(trace.records) < 2:
        return 0.0
    return estimate_from_trace(trace).b


def cross_check(env: Environment, cap: int) -> CrossCheckRecord:
    """Run BFS then ID to ``cap`` on the same environment.

    The successor cache is cleared before each run, so ID asks the
    environment again instead of reusing BFS's answers. An environment whose
    answers depend on hidden history then shows up as a mismatch.
    """
    env.clear_cache()
    t_bfs = bfs_enumerate(env, cap)
    env.clear_cache()
    t_id = id_enumerate(env, cap)
    b_bfs, b_id = _b(t_bfs), _b(t_id)
    return CrossCheckRecord(
        env_name=env.descriptor.name,
        states_bfs=t_bfs.final.cumulative_states,
        states_id=t_id.final.cumulative_states,
        frames_bfs=t_bfs.final.frame,
        frames_id=t_id.final.frame,
        b_bfs=b_bfs,
        b_id=b_id,
        b_diff=abs(b_bfs - b_id),
        traces_match=t_bfs.same_counts(t_id),
    )


@dataclass
class ProbeResult:
    deterministic: bool
    actions: list[int]
    # first frame (1-based: state after that many actions) where replays differ
    divergence_frame: int | None = None
    divergent_keys: list[StateKey] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.deterministic

    def describe(self) -> str:
        if self.deterministic:
            return f"deterministic over {len(self.actions)} frames"
        keys = ", ".join(k.hex() for k in self.divergent_keys)
        return f"replays diverge at frame {self.divergence_frame}: {keys}"


def determinism_probe(env: Environment, sequence_length: int, trials: int = 2,
                      seed: int = 0) -> ProbeResult:
    """Replay one pseudorandom action sequence ``trials`` times and compare.

    Replays go through ``replay_successors`` so cached answers cannot mask
    an environment that answers the same question differently.
    """
    if trials < 2:
        raise InvalidInput(f"trials must be >= 2, got {trials}")
    if sequence_length < 1:
        raise InvalidInput(f"sequence_length must be >= 1, got {sequence_length}")
    rng = random.Random(seed)
    actions = [rng.randrange(env.num_actions) for _ in range(sequence_length)]
    root = env.initial_state()

    runs = []
    for _ in range(trials):
        key, path = root, []
        for a in actions:
            key = env.replay_successors(key)[a]
            path.append(key)
        runs.append(path)

    for i in range(sequence_length):
        at_i = [run[i] for run in runs]
        if any(k != at_i[0] for k in at_i):
            return ProbeResult(False, actions, i + 1, at_i)
    return ProbeResult(True, actions)


def detect_dead_initial(env: Environment) -> bool:
    """True iff no action changes the root key."""
    root = env.initial_state()
    return all(k == root for k in env.successors(root))


@dataclass
class WarmUp:
    root: StateKey
    steps: int


def warm_up(env: Environment, max_steps: int = DEFAULT_WARMUP_STEPS) -> WarmUp:
    """Step ``env`` with the no-op action until its root is no longer dead.

    Frame numbering of any later enumeration restarts at the new root.
    Raises StillDead if ``max_steps`` no-ops do not bring the root to life.
    """
    if max_steps < 1:
        raise InvalidInput(f"max_steps must be >= 1, got {max_steps}")
    noop = env.descriptor.noop_action
    steps = 0
    while detect_dead_initial(env):
        if steps == max_steps:
            raise StillDead(
                f"{env.descriptor.name}: initial state still dead after {steps} no-op steps"
            )
        env.advance(noop)
        steps += 1
    return WarmUp(env.initial_state(), steps)
