"""Average node branching factors by exhaustive state enumeration."""

from .core import (
    ActionId,
    AdapterFailure,
    BadParams,
    BranchingEstimate,
    BranchscopeError,
    CapacityExceeded,
    CrossCheckRecord,
    EmptyTrace,
    EnumerationRecord,
    EnumerationTrace,
    EnvDescriptor,
    Environment,
    InvalidInput,
    MalformedState,
    StateKey,
    StillDead,
    Termination,
    UnknownEnv,
)
from .enumeration import SeenSet, bfs_enumerate, edge_branching, id_enumerate
from .environments import adapter_connect, make_env
from .estimator import estimate_branching, estimate_from_trace, geometric_cumulative
from .validator import cross_check, detect_dead_initial, determinism_probe, warm_up

__version__ = "0.1.0"
