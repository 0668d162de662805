"""State identity model, environment contract and shared record types.

A state key is the full canonical byte string of a game state: core memory
followed by any controller-extension bytes. Two states are the same state
iff their keys are byte-equal. Keys never carry a frame number.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

StateKey = bytes
ActionId = int


class BranchscopeError(Exception):
    """Base class for all errors raised by this package."""


class AdapterFailure(BranchscopeError):
    """An external environment did not answer, answered badly, or exited."""


class MalformedState(BranchscopeError):
    """A state key has the wrong length for its environment."""


class CapacityExceeded(BranchscopeError):
    """The seen-set hit its memory budget."""


class EmptyTrace(BranchscopeError):
    """A trace has no expanded states to average over."""


class InvalidInput(BranchscopeError, ValueError):
    pass


class UnknownEnv(BranchscopeError, KeyError):
    pass


class BadParams(BranchscopeError, ValueError):
    pass


class StillDead(BranchscopeError):
    """Warm-up ran out of steps and the initial state is still dead."""


@dataclass(frozen=True)
class EnvDescriptor:
    name: str
    num_actions: int
    noop_action: ActionId
    state_key_len: int
    has_controller_state: bool = False

    def __post_init__(self):
        if self.num_actions < 1:
            raise BadParams(f"num_actions must be positive, got {self.num_actions}")
        if not 0 <= self.noop_action < self.num_actions:
            raise BadParams(
                f"noop_action {self.noop_action} outside [0, {self.num_actions})"
            )
        if self.state_key_len < 1:
            raise BadParams(f"state_key_len must be >= 1, got {self.state_key_len}")


class Environment:
    """Deterministic discrete-action environment.

    Subclasses set ``descriptor`` and implement ``_root`` and ``_successors``.
    The public methods add key-length checking. ``advance`` moves the root
    forward by one action; it is what warm-up uses to step past a dead
    initial state.
    """

    descriptor: EnvDescriptor

    def __init__(self):
        self._root_override: StateKey | None = None

    # -- subclass hooks -------------------------------------------------
    def _root(self) -> StateKey:
        raise NotImplementedError

    def _successors(self, state: StateKey) -> list[StateKey]:
        raise NotImplementedError

    # -- contract ---------------------------------------------------------
    @property
    def num_actions(self) -> int:
        return self.descriptor.num_actions

    def check_key(self, state: StateKey) -> StateKey:
        if len(state) != self.descriptor.state_key_len:
            raise MalformedState(
                f"{self.descriptor.name}: key of length {len(state)}, "
                f"expected {self.descriptor.state_key_len}"
            )
        return state

    def initial_state(self) -> StateKey:
        if self._root_override is not None:
            return self._root_override
        return self.check_key(self._root())

    def successors(self, state: StateKey) -> list[StateKey]:
        self.check_key(state)
        out = self._successors(state)
        if len(out) != self.descriptor.num_actions:
            raise MalformedState(
                f"{self.descriptor.name}: {len(out)} successors, "
                f"expected {self.descriptor.num_actions}"
            )
        for key in out:
            self.check_key(key)
        return out

    def replay_successors(self, state: StateKey) -> list[StateKey]:
        """Successors bypassing any response cache (used by replay probes)."""
        return self.successors(state)

    def advance(self, action: ActionId) -> StateKey:
        """Make the successor of the current root under ``action`` the new root."""
        new_root = self.successors(self.initial_state())[action]
        self._root_override = new_root
        return new_root

    def clear_cache(self) -> None:
        """Forget cached successor answers, if the environment keeps any."""

    def close(self) -> None:
        pass

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


@dataclass(frozen=True, slots=True)
class EnumerationRecord:
    frame: int
    new_states: int
    cumulative_states: int


class Termination(enum.Enum):
    CAP_REACHED = "cap reached"
    FRONTIER_EXHAUSTED = "frontier exhausted"


@dataclass
class EnumerationTrace:
    records: list[EnumerationRecord]
    edge_move_count: int
    edge_distinct_count: int
    terminated_by: Termination
    env_name: str = ""
    expanded_states: int = 0

    @property
    def final(self) -> EnumerationRecord:
        return self.records[-1]

    def counts(self) -> list[tuple[int, int, int]]:
        return [(r.frame, r.new_states, r.cumulative_states) for r in self.records]

    def same_counts(self, other: "EnumerationTrace") -> bool:
        return (
            self.records == other.records
            and self.edge_move_count == other.edge_move_count
            and self.edge_distinct_count == other.edge_distinct_count
            and self.terminated_by == other.terminated_by
        )


@dataclass(frozen=True)
class BranchingEstimate:
    frames: int
    states: float
    b: float
    residual: float
    # final bisection bracket; g(lo) <= 0 <= g(hi)
    bracket: tuple[float, float] = field(default=(0.0, 0.0), compare=False)


@dataclass(frozen=True)
class CrossCheckRecord:
    env_name: str
    states_bfs: int
    states_id: int
    frames_bfs: int
    frames_id: int
    b_bfs: float
    b_id: float
    b_diff: float
    traces_match: bool = True

    @property
    def agrees(self) -> bool:
        return self.traces_match and self.b_diff == 0.0
