"""Average node branching factor from a cumulative state count.

If a game had uniform branching factor ``b``, the number of distinct states
seen by frame ``f`` would be ``1 + b + ... + b**f``. Given an observed count
``s`` we solve ``g(b) = 1 + b + ... + b**f - s = 0`` for its unique root on
``b >= 0``.
"""

from __future__ import annotations

import math

from .core import BranchingEstimate, EnumerationTrace, InvalidInput

TOLERANCE = 1e-9
# |b - 1| below this uses a series about b = 1 instead of the closed form
NEAR_ONE = 1e-9
_MAX_ITER = 2200
_LOG_MAX = math.log(1.7976931348623157e308)


def geometric_cumulative(b: float, f: int) -> float:
    """Return ``sum(b**i for i in range(f + 1))``, or ``inf`` on overflow."""
    if b < 0 or f < 0:
        raise InvalidInput(f"need b >= 0 and f >= 0, got b={b}, f={f}")
    if b == 0:
        return 1.0
    e = b - 1.0
    if abs(e) <= NEAR_ONE:
        # (f+1) * (1 + f e / 2 + f (f-1) e^2 / 6); plain f + 1 is off by
        # hundreds of states once f reaches 1e6
        return (f + 1) * (1.0 + f * e / 2.0 + f * (f - 1) * e * e / 6.0)
    x = (f + 1) * math.log(b)
    if x > _LOG_MAX:
        return math.inf
    if float(b).is_integer():
        n = int(b)
        try:
            return float((n ** (f + 1) - 1) // (n - 1))
        except OverflowError:
            return math.inf
    # expm1 keeps precision when b**(f+1) is close to 1
    return math.expm1(x) / e


def _g(b: float, s: float, f: int) -> float:
    return geometric_cumulative(b, f) - s


def estimate_branching(s: float, f: int, tol: float = 0.0) -> BranchingEstimate:
    """Solve ``1 + b + ... + b**f = s`` for ``b >= 0`` by bisection.

    ``s`` is normally an integer state count but any real ``s >= 1`` works.
    The bracket starts at [0, 2] and its upper end doubles until ``g >= 0``;
    an overflowing ``g`` counts as positive. Bisection stops once the
    bracket is narrower than ``tol`` or cannot be split further in floating
    point, so the default gives the root to within a few ulps, well inside
    TOLERANCE.
    """
    if not (s >= 1) or f < 1 or int(f) != f:
        raise InvalidInput(f"need s >= 1 and integer f >= 1, got s={s}, f={f}")
    f = int(f)
    lo, hi = 0.0, 2.0
    g_lo = _g(lo, s, f)
    if g_lo == 0.0:
        return BranchingEstimate(frames=f, states=s, b=0.0, residual=0.0, bracket=(0.0, 0.0))
    g_hi = _g(hi, s, f)
    while g_hi < 0.0:
        lo, g_lo = hi, g_hi
        hi *= 2.0
        g_hi = _g(hi, s, f)
    for _ in range(_MAX_ITER):
        if g_hi == 0.0:
            lo, g_lo = hi, g_hi
            break
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        g_mid = _g(mid, s, f)
        if g_mid < 0.0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    b, res = (hi, g_hi) if abs(g_hi) <= abs(g_lo) else (lo, g_lo)
    return BranchingEstimate(frames=f, states=s, b=b, residual=res, bracket=(lo, hi))


def estimate_from_trace(trace: EnumerationTrace, tol: float = 0.0) -> BranchingEstimate:
    if len(trace.records) < 2:
        raise InvalidInput("trace has only the root record; nothing to estimate")
    last = trace.final
    return estimate_branching(last.cumulative_states, last.frame, tol=tol)
