import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from scipy.optimize import brentq

from branchscope.core import EnumerationRecord, EnumerationTrace, InvalidInput, Termination
from branchscope.estimator import (
    TOLERANCE,
    estimate_branching,
    estimate_from_trace,
    geometric_cumulative,
)


def poly_root(s, f):
    """Oracle: positive real root of (1 - s) + b + ... + b^f via numpy.roots."""
    roots = np.roots([1.0] * f + [1.0 - s])
    real = [r.real for r in roots if abs(r.imag) < 1e-9 and r.real > 0]
    assert len(real) == 1
    return real[0]


def direct_sum(b, f):
    return math.fsum(b**i for i in range(f + 1))


# -- geometric_cumulative ----------------------------------------------------
@pytest.mark.parametrize("b,f,expected", [
    (1, 10, 11),
    (2, 2, 7),
    (18, 5, 2_000_719),  # (18**6 - 1) // 17
    (0, 5, 1),
])
def test_geometric_examples(b, f, expected):
    assert geometric_cumulative(b, f) == expected


@given(b=st.floats(0, 4), f=st.integers(0, 60))
def test_geometric_matches_direct_sum(b, f):
    assert geometric_cumulative(b, f) == pytest.approx(direct_sum(b, f), rel=1e-9)


def test_geometric_overflow_sentinel():
    assert geometric_cumulative(18, 1000) == math.inf
    assert geometric_cumulative(2.5, 10**6) == math.inf


def mp_sum(b, f):
    """Oracle: closed form evaluated at the exact float ``b`` in 50 digits."""
    with mpmath.workdps(50):
        x = mpmath.mpf(b)
        if x == 1:
            return float(f + 1)
        return float((x ** (f + 1) - 1) / (x - 1))


@pytest.mark.parametrize("f", [10, 1000, 10**6])
@pytest.mark.parametrize("e", [1e-9, -1e-9, 5e-10, 3e-9, -3e-9, 1e-7])
def test_geometric_accurate_around_one(f, e):
    # the series branch and the closed form meet at |b - 1| = 1e-9; both
    # have to be accurate there or the sum jumps across the edge
    for b in (1 + e * 0.999, 1 + e, 1 + e * 1.001):
        assert geometric_cumulative(b, f) == pytest.approx(mp_sum(b, f), rel=1e-9)


# -- estimate_branching ------------------------------------------------------
def test_estimate_examples():
    assert estimate_branching(7, 2).b == pytest.approx(2.0, abs=1e-9)
    assert estimate_branching(11, 10).b == pytest.approx(1.0, abs=1e-9)
    assert estimate_branching(1, 5).b == 0.0
    assert estimate_branching(4, 2).b == pytest.approx((-1 + math.sqrt(13)) / 2, abs=1e-9)
    assert estimate_branching(2_000_719, 5).b == pytest.approx(18.0, abs=1e-6)


@pytest.mark.parametrize("s,f", [(4, 2), (4, 3), (100, 3), (1000, 7), (2_000_719, 5), (12, 10)])
def test_estimate_matches_numpy_roots(s, f):
    assert estimate_branching(s, f).b == pytest.approx(poly_root(s, f), abs=1e-8)


def test_mod_rotator_point_is_the_chain_case():
    # s = 4 at f = 3 means 1 + b + b^2 + b^3 = 4, whose positive root is 1
    oracle = brentq(lambda b: direct_sum(b, 3) - 4, 0.0, 2.0, xtol=1e-14)
    assert oracle == pytest.approx(1.0, abs=1e-12)
    assert estimate_branching(4, 3).b == pytest.approx(oracle, abs=1e-9)


@pytest.mark.parametrize("s,f", [(0, 3), (5, 0), (-1, 1), (5, 1.5)])
def test_estimate_rejects_bad_input(s, f):
    with pytest.raises(InvalidInput):
        estimate_branching(s, f)


def test_residual_and_bracket():
    est = estimate_branching(1000, 7)
    lo, hi = est.bracket
    assert hi - lo <= TOLERANCE
    assert direct_sum(lo, 7) - 1000 <= 0 <= direct_sum(hi, 7) - 1000
    assert est.residual == pytest.approx(geometric_cumulative(est.b, 7) - 1000)
    # g is increasing: one sign change, no other positive root
    eps = 1e-6
    assert geometric_cumulative(est.b - eps, 7) < 1000 < geometric_cumulative(est.b + eps, 7)


@pytest.mark.parametrize("b", [0.5, 1.0, 1.001, 1.19, 2, 3, 5, 18])
@pytest.mark.parametrize("f", [1, 5, 50, 1000])
def test_round_trip_exact_s(b, f):
    s = geometric_cumulative(b, f)
    if math.isinf(s):
        pytest.skip("sum overflows a double")
    est = estimate_branching(s, f).b
    assert est == pytest.approx(b, abs=1e-9 * max(1.0, b))


@pytest.mark.parametrize("b", [0.5, 1.0, 1.001, 1.19, 2, 3, 5, 18])
@pytest.mark.parametrize("f", [1, 5, 50, 1000])
def test_round_trip_rounded_s(b, f):
    s_real = geometric_cumulative(b, f)
    if math.isinf(s_real) or s_real > 2**53:
        pytest.skip("count not representable as an exact integer")
    s = round(s_real)
    est = estimate_branching(s, f).b
    if s == s_real:
        assert est == pytest.approx(b, abs=1e-9 * max(1.0, b))
    else:
        # rounding s by at most 1/2 moves the root by at most 1/2 / g'(b)
        deriv = math.fsum(i * b ** (i - 1) for i in range(1, f + 1))
        assert abs(est - b) <= 0.5 / deriv + 1e-9
        if 0.5 / deriv < 1e-4:
            assert est == pytest.approx(b, abs=1e-4)


@given(s=st.integers(2, 10**9), f=st.integers(1, 200))
def test_monotone_in_s(s, f):
    assert estimate_branching(s + 1, f).b > estimate_branching(s, f).b


@given(s=st.integers(2, 10**9), f=st.integers(1, 200))
def test_monotone_in_f(s, f):
    b_f, b_next = estimate_branching(s, f).b, estimate_branching(s, f + 1).b
    assert b_next <= b_f
    if s >= f + 2:
        # root above 1: neighbouring roots are at least ~1/f^2 apart
        assert b_next < b_f


@given(s=st.integers(1, 10**12), f=st.integers(1, 400))
def test_solution_satisfies_equation(s, f):
    est = estimate_branching(s, f)
    assume(est.b > 0)
    lo, hi = est.bracket
    assert abs(est.b - lo) <= TOLERANCE and abs(est.b - hi) <= TOLERANCE
    assert geometric_cumulative(lo, f) <= s <= geometric_cumulative(hi, f)


def _trace(rows, term=Termination.CAP_REACHED):
    return EnumerationTrace([EnumerationRecord(*r) for r in rows], 0, 0, term)


def test_estimate_from_trace():
    assert estimate_from_trace(_trace([(0, 1, 1), (1, 2, 3), (2, 4, 7)])).b == pytest.approx(2.0)
    rot = _trace([(0, 1, 1), (1, 2, 3), (2, 1, 4), (3, 0, 4)], Termination.FRONTIER_EXHAUSTED)
    assert estimate_from_trace(rot).b == pytest.approx(1.0, abs=1e-9)
    chain = _trace([(i, 1, i + 1) for i in range(30)])
    assert estimate_from_trace(chain).b == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(InvalidInput):
        estimate_from_trace(_trace([(0, 1, 1)]))
