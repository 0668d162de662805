import shlex
import sys

import hypothesis
import networkx as nx
import pytest

from branchscope.environments import BUILTINS, make_env

hypothesis.settings.register_profile("ci", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=5, deadline=None)
hypothesis.settings.load_profile("ci")

BUILTIN_NAMES = sorted(BUILTINS)


def fake_cmd(env_name, *args):
    """Shell command serving a built-in over the adapter protocol."""
    parts = [sys.executable, "-m", "branchscope.fake_emulator", env_name, *args]
    return shlex.join(parts)


def brute_force_layers(env, max_states=100_000):
    """Oracle: explicit transition graph, then shortest-path depths via networkx.

    Independent of the enumeration engines: it only uses ``successors`` to
    materialize the reachable graph and lets networkx compute depths.
    """
    root = env.initial_state()
    g = nx.DiGraph()
    g.add_node(root)
    todo, seen = [root], {root}
    while todo:
        k = todo.pop()
        for c in env.successors(k):
            g.add_edge(k, c)
            if c not in seen:
                seen.add(c)
                todo.append(c)
                if len(seen) > max_states:
                    raise RuntimeError("state space too large for brute force")
    depth = nx.single_source_shortest_path_length(g, root)
    layers = [0] * (max(depth.values()) + 1)
    for d in depth.values():
        layers[d] += 1
    return g, depth, layers


def expected_records(layers, cap):
    """Trace records implied by per-depth layer sizes and cap semantics."""
    out = [(0, 1, 1)]
    cum = 1
    f = 0
    while cum < cap:
        f += 1
        new = layers[f] if f < len(layers) else 0
        cum += new
        out.append((f, new, cum))
        if new == 0:
            break
    return out


@pytest.fixture(params=BUILTIN_NAMES)
def builtin_name(request):
    return request.param


@pytest.fixture
def builtin_env(builtin_name):
    return make_env(builtin_name)


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
