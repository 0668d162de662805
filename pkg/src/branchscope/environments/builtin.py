"""Built-in ground-truth environments.

Every environment here is a pure function of its key except DeadStart,
which deliberately keeps an "uninitialized" flag outside the key.
"""

from __future__ import annotations

import struct

from ..core import BadParams, CapacityExceeded, EnvDescriptor, Environment, StateKey

_TREE = struct.Struct("<IQ")
_U64_MAX = 2**64 - 1


def _clamp(x: int, lo: int, hi: int) -> int:
    return lo if x < lo else hi if x > hi else x


class UniformTree(Environment):
    """Every state has exactly ``b`` children and no two paths meet.

    Key: frame (u32) then index within the frame (u64), little-endian.
    """

    def __init__(self, b: int = 2):
        super().__init__()
        if not 1 <= b <= 18:
            raise BadParams(f"uniform_tree needs 1 <= b <= 18, got {b}")
        self.b = b
        self.descriptor = EnvDescriptor(
            name=f"uniform_tree_b{b}",
            num_actions=b,
            noop_action=0,
            state_key_len=_TREE.size,
        )

    def _root(self) -> StateKey:
        return _TREE.pack(0, 0)

    def _successors(self, state: StateKey) -> list[StateKey]:
        frame, index = _TREE.unpack(state)
        b = self.b
        base = index * b
        if base + b - 1 > _U64_MAX:
            raise CapacityExceeded(f"uniform_tree index overflow at frame {frame}")
        pack = _TREE.pack
        return [pack(frame + 1, base + a) for a in range(b)]


class ModRotator(Environment):
    """Position on a ring of ``m`` cells; actions are +1 and -1.

    The state space is a graph: +1,-1 and -1,+1 lead back to the same key.
    There is no true no-op; index 0 is reported as one only to satisfy the
    descriptor.
    """

    def __init__(self, m: int = 4):
        super().__init__()
        if m < 2:
            raise BadParams(f"mod_rotator needs m >= 2, got {m}")
        if m > 2**32:
            raise BadParams(f"mod_rotator needs m <= 2**32, got {m}")
        self.m = m
        self._fmt = "<B" if m <= 256 else "<I"
        self.descriptor = EnvDescriptor(
            name=f"mod_rotator_m{m}",
            num_actions=2,
            noop_action=0,
            state_key_len=struct.calcsize(self._fmt),
        )

    def key(self, pos: int) -> StateKey:
        return struct.pack(self._fmt, pos % self.m)

    def _root(self) -> StateKey:
        return self.key(0)

    def _successors(self, state: StateKey) -> list[StateKey]:
        (pos,) = struct.unpack(self._fmt, state)
        return [self.key(pos + 1), self.key(pos - 1)]


class PaddleMini(Environment):
    """Toy paddle game: one core byte plus one controller byte.

    The core byte ``t`` counts frames modulo ``period`` and ignores input.
    The controller byte ``p`` is the paddle position, moved by ``delta`` per
    left/right action and clamped to ``[lo, hi]``. Actions: 0 no-op,
    1 right (+delta), 2 left (-delta). Key is ``bytes([t, p])``.

    ``core_only_key`` yields the one-byte RAM-only identity, used to show
    how many states a key without the controller byte misses.
    """

    def __init__(self, period: int = 8, lo: int = 0, hi: int = 7, start: int = 3,
                 delta: int = 1):
        super().__init__()
        if not 1 <= period <= 256:
            raise BadParams(f"paddle_mini period must be in [1, 256], got {period}")
        if not 0 <= lo <= start <= hi <= 255:
            raise BadParams("paddle_mini needs 0 <= lo <= start <= hi <= 255")
        if delta < 1:
            raise BadParams(f"paddle_mini delta must be >= 1, got {delta}")
        self.period, self.lo, self.hi, self.start, self.delta = period, lo, hi, start, delta
        self.descriptor = EnvDescriptor(
            name="paddle_mini",
            num_actions=3,
            noop_action=0,
            state_key_len=2,
            has_controller_state=True,
        )

    def _root(self) -> StateKey:
        return bytes((0, self.start))

    def _successors(self, state: StateKey) -> list[StateKey]:
        t, p = state
        t2 = (t + 1) % self.period
        return [
            bytes((t2, p)),
            bytes((t2, _clamp(p + self.delta, self.lo, self.hi))),
            bytes((t2, _clamp(p - self.delta, self.lo, self.hi))),
        ]

    @staticmethod
    def core_only_key(state: StateKey) -> StateKey:
        return state[:1]


class FreezeFrames(Environment):
    """Input is ignored for ``k`` frames after every move.

    State is (phase, pos). With phase > 0 every action goes to
    (phase - 1, pos). With phase 0, action ``a`` goes to (k, (pos + a) % M).
    """

    def __init__(self, k: int = 2, M: int = 4, A: int = 2):
        super().__init__()
        if not 0 <= k <= 255:
            raise BadParams(f"freeze_frames needs 0 <= k <= 255, got {k}")
        if not 1 <= M <= 256:
            raise BadParams(f"freeze_frames needs 1 <= M <= 256, got {M}")
        if A < 1:
            raise BadParams(f"freeze_frames needs A >= 1, got {A}")
        self.k, self.M, self.A = k, M, A
        self.descriptor = EnvDescriptor(
            name=f"freeze_frames_k{k}_m{M}_a{A}",
            num_actions=A,
            noop_action=0,
            state_key_len=2,
        )

    def _root(self) -> StateKey:
        return bytes((0, 0))

    def _successors(self, state: StateKey) -> list[StateKey]:
        phase, pos = state
        if phase > 0:
            return [bytes((phase - 1, pos))] * self.A
        return [bytes((self.k, (pos + a) % self.M)) for a in range(self.A)]


class DeadStart(Environment):
    """Bug fixture: the root ignores all input until the env is stepped.

    The "initialized" flag lives outside the key, like emulator RAM that has
    not been set up yet. While dead, every action returns the input key.
    Once live, key byte 0 counts frames mod 16 and byte 1 is a position in
    [0, 7] moved by the actions (0 no-op, 1 +1, 2 -1).

    ``dead_steps`` is how many ``advance`` calls it takes to come alive;
    a negative value means never.
    """

    def __init__(self, dead_steps: int = 1):
        super().__init__()
        self.dead_steps = dead_steps
        self._dead_remaining = dead_steps
        self.descriptor = EnvDescriptor(
            name="dead_start",
            num_actions=3,
            noop_action=0,
            state_key_len=2,
        )

    @property
    def dead(self) -> bool:
        return self._dead_remaining != 0

    def _root(self) -> StateKey:
        return bytes((0, 0))

    def _successors(self, state: StateKey) -> list[StateKey]:
        if self.dead:
            return [state] * 3
        c, p = state
        c2 = (c + 1) % 16
        return [bytes((c2, p)), bytes((c2, _clamp(p + 1, 0, 7))), bytes((c2, _clamp(p - 1, 0, 7)))]

    def advance(self, action: int) -> StateKey:
        if self.dead:
            if self._dead_remaining > 0:
                self._dead_remaining -= 1
            return self.initial_state()
        return super().advance(action)
