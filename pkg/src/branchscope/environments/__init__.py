"""Environment registry: built-in ground truths plus the subprocess adapter."""

from __future__ import annotations

from typing import Any, Mapping

from ..core import BadParams, Environment, UnknownEnv
from .adapter import AdapterEnv, adapter_connect
from .builtin import DeadStart, FreezeFrames, ModRotator, PaddleMini, UniformTree

BUILTINS = {
    "uniform_tree": UniformTree,
    "mod_rotator": ModRotator,
    "paddle_mini": PaddleMini,
    "freeze_frames": FreezeFrames,
    "dead_start": DeadStart,
}

ENV_NAMES = (*BUILTINS, "adapter")


def _as_int(name: str, key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise BadParams(f"{name}: parameter {key} must be an integer")
    try:
        return int(value)
    except (TypeError, ValueError):
        raise BadParams(f"{name}: parameter {key}={value!r} is not an integer") from None


def make_env(name: str, params: Mapping[str, Any] | None = None) -> Environment:
    """Build an environment by registry name.

    Built-in parameters may be given as strings (as they arrive from the
    command line). The adapter takes ``cmd`` and optionally ``timeout`` and
    ``name``.
    """
    params = dict(params or {})
    if name == "adapter":
        if "cmd" not in params:
            raise BadParams("adapter needs a cmd parameter")
        cmd = params.pop("cmd")
        timeout = float(params.pop("timeout", 10.0))
        label = str(params.pop("name", "adapter"))
        if params:
            raise BadParams(f"adapter: unknown parameters {sorted(params)}")
        return adapter_connect(cmd, timeout=timeout, name=label)
    try:
        cls = BUILTINS[name]
    except KeyError:
        raise UnknownEnv(f"unknown environment {name!r}; choose from {', '.join(ENV_NAMES)}") from None
    kwargs = {k: _as_int(name, k, v) for k, v in params.items()}
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise BadParams(f"{name}: {e}") from None


__all__ = [
    "AdapterEnv",
    "BUILTINS",
    "DeadStart",
    "ENV_NAMES",
    "FreezeFrames",
    "ModRotator",
    "PaddleMini",
    "UniformTree",
    "adapter_connect",
    "make_env",
]
