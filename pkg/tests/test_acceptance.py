"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary.
"""

import contextlib
import math
import resource
import time

import numpy as np
import pytest

from branchscope.cli import main
from branchscope.enumeration import bfs_enumerate, edge_branching, id_enumerate
from branchscope.environments import DeadStart, ModRotator, PaddleMini, UniformTree, adapter_connect, make_env
from branchscope.estimator import estimate_branching, estimate_from_trace
from branchscope.validator import cross_check, detect_dead_initial, determinism_probe, warm_up

import conftest
from conftest import BUILTIN_NAMES, fake_cmd

CAP = 1_000_000


@contextlib.contextmanager
def criterion(name):
    detail = {"text": ""}
    try:
        yield detail
    except BaseException as exc:
        conftest.ACCEPTANCE_RESULTS.append((name, False, f"{type(exc).__name__}: {exc}"))
        print(f"FAIL {name}")
        raise
    conftest.ACCEPTANCE_RESULTS.append((name, True, detail["text"]))
    print(f"PASS {name}: {detail['text']}")


def peak_rss_gb():
    # ru_maxrss is in KiB on Linux
    usage = max(resource.getrusage(resource.RUSAGE_SELF).ru_maxrss,
                resource.getrusage(resource.RUSAGE_CHILDREN).ru_maxrss)
    return usage / 1024 ** 2


@pytest.mark.slow
def test_1_estimator_exactness():
    with criterion("1 estimator exactness on uniform trees") as d:
        parts = []
        for b in (1, 2, 3, 5, 18):
            t0 = time.perf_counter()
            trace = bfs_enumerate(UniformTree(b), CAP)
            elapsed = time.perf_counter() - t0
            est = estimate_from_trace(trace)
            assert abs(est.b - b) <= 1e-6, (b, est.b)
            assert elapsed < 60, (b, elapsed)
            expected_s = est.frames + 1 if b == 1 else (b ** (est.frames + 1) - 1) // (b - 1)
            assert est.states == expected_s
            parts.append(f"b={b} f={est.frames} s={est.states} {elapsed:.1f}s")
            if b == 18:
                assert (est.frames, est.states) == (5, 2_000_719)
        rss = peak_rss_gb()
        assert rss < 4, rss
        d["text"] = "; ".join(parts) + f"; peak rss {rss:.2f} GB"


def test_2_closed_form_spot_checks():
    with criterion("2 closed-form spot checks") as d:
        cases = [(7, 2, 2.0), (11, 10, 1.0), (1, 5, 0.0), (4, 2, (-1 + math.sqrt(13)) / 2)]
        for s, f, want in cases:
            got = estimate_branching(s, f).b
            assert abs(got - want) <= 1e-9, (s, f, got, want)
        d["text"] = "(7,2)=2 (11,10)=1 (1,5)=0 (4,2)=1.302776 within 1e-9"


def test_3_bfs_id_agreement():
    with criterion("3 BFS and ID agree on built-ins") as d:
        for name in BUILTIN_NAMES:
            for cap in (10, 100, 10_000):
                env = make_env(name)
                a = bfs_enumerate(env, cap)
                b = id_enumerate(env, cap)
                assert a.records == b.records, (name, cap)
                assert a.terminated_by == b.terminated_by
        assert main(["validate", "--all-builtin"]) == 0
        d["text"] = f"{len(BUILTIN_NAMES)} envs x 3 caps identical; validate --all-builtin exit 0"


def test_4_node_vs_edge_branching():
    with criterion("4 node estimate below edge branching on ModRotator(4)") as d:
        trace = bfs_enumerate(ModRotator(4), 10)
        est = estimate_from_trace(trace)
        assert (est.states, est.frames) == (4, 3)
        # oracle: positive real root of b^3 + b^2 + b - 3 = 0
        roots = np.roots([1, 1, 1, -3])
        oracle = max(r.real for r in roots if abs(r.imag) < 1e-12)
        assert abs(est.b - oracle) <= 1e-9
        assert edge_branching(trace) == 2.0
        assert est.b < edge_branching(trace)
        d["text"] = f"node b={est.b:.4f} (cubic oracle {oracle:.4f}), edge b=2.0"


def test_5_state_underspecification():
    with criterion("5 paddle full key vs core-only key") as d:
        full = bfs_enumerate(PaddleMini(), 10_000)
        core = bfs_enumerate(PaddleMini(), 10_000, key=PaddleMini.core_only_key)
        assert full.final.cumulative_states == 64
        assert core.final.cumulative_states == 8
        d["text"] = "64 states with controller byte, 8 without"


def test_6_dead_start():
    with criterion("6 dead start detection and warm-up") as d:
        env = DeadStart()
        assert detect_dead_initial(env)
        assert bfs_enumerate(env, 100).final.cumulative_states == 1
        w = warm_up(env)
        assert w.steps == 1
        trace = bfs_enumerate(env, 100)
        assert trace.records[1].cumulative_states > 1
        d["text"] = (f"1 state before warm-up; after {w.steps} no-op "
                     f"frame 1 has {trace.records[1].cumulative_states} states")


def test_7_adapter_equivalence(tmp_path, capsys):
    with criterion("7 adapter equivalence and nondeterminism detection") as d:
        local, remote = tmp_path / "local.csv", tmp_path / "remote.csv"
        assert main(["enumerate", "--env", "mod_rotator", "--cap", "10", "--out", str(local)]) == 0
        assert main(["enumerate", "--env", "adapter", "--param", f"cmd={fake_cmd('mod_rotator')}",
                     "--label", "mod_rotator_m4", "--cap", "10", "--out", str(remote)]) == 0
        assert local.read_bytes() == remote.read_bytes()

        with adapter_connect(fake_cmd("mod_rotator", "--glitch-at", "3")) as env:
            probe = determinism_probe(env, 20, seed=0)
        assert not probe
        with adapter_connect(fake_cmd("mod_rotator", "--glitch-at", "3")) as env:
            check = cross_check(env, 10)
        assert check.b_diff > 0
        cmd = fake_cmd("mod_rotator", "--glitch-at", "3")
        assert main(["validate", "--env", "adapter", "--param", f"cmd={cmd}", "--cap", "10"]) == 1
        capsys.readouterr()
        d["text"] = (f"byte-identical trace; probe diverged at frame {probe.divergence_frame}; "
                     f"b_diff={check.b_diff:.4f}; validate exit 1")


@pytest.mark.slow
def test_8_parallel_determinism(tmp_path, capsys):
    with criterion("8 worker count does not change the trace") as d:
        one, eight = tmp_path / "w1.csv", tmp_path / "w8.csv"
        base = ["enumerate", "--env", "uniform_tree", "--param", "b=3", "--cap", str(CAP)]
        assert main(base + ["--workers", "1", "--out", str(one)]) == 0
        assert main(base + ["--workers", "8", "--out", str(eight)]) == 0
        assert one.read_bytes() == eight.read_bytes()
        capsys.readouterr()
        d["text"] = f"{len(one.read_bytes())}-byte CSVs identical"
