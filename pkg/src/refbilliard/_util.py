"""Small shared numerical helpers (angle wrapping, bracketed event location)."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from .errors import EventDetectionFailed, TangentialCrossing

TWO_PI = 2.0 * math.pi


def wrap_pi(x):
    """Wrap angle(s) to [-pi, pi)."""
    w = np.mod(np.asarray(x, dtype=float) + np.pi, TWO_PI) - np.pi
    return w if np.ndim(w) else float(w)


def arccot(x: float) -> float:
    """Inverse cotangent with range (0, pi)."""
    return math.pi / 2 - math.atan(x)


def first_crossing(fun, grid, inside_sign: float, refine: int = 3):
    """First zero of ``fun`` along ``grid`` after it leaves zero.

    ``fun`` maps an array of parameters to an array of values; the trajectory
    starts at fun(grid[0]) ~= 0, moves to values of sign ``inside_sign`` and
    exits at the first crossing back through zero.  Returns the crossing
    parameter (float) located by Brent's method, or raises.

    ``refine`` controls how many times the initial portion is subdivided if
    the grid never shows the interior sign (near-tangential starts).
    """
    g = np.asarray(grid, dtype=float)
    for _ in range(refine + 1):
        vals = np.asarray(fun(g), dtype=float)
        s = inside_sign * vals
        # first index where the arc is clearly on the interior side
        inside = np.nonzero(s[1:] > 0)[0]
        if inside.size == 0:
            # never left the boundary at this resolution: refine near start
            g = np.linspace(g[0], g[0] + (g[1] - g[0]) * (len(g) - 1) / 8,
                            len(g))
            continue
        i0 = inside[0] + 1
        # first index after i0 where the sign flips back (exit)
        out = np.nonzero(s[i0:] <= 0)[0]
        if out.size == 0:
            return None  # caller may extend the window
        j = out[0] + i0
        a, b = g[j - 1], g[j]
        return brentq(lambda t: float(np.asarray(fun(np.array([t])))[0]),
                      a, b, xtol=1e-14, rtol=8.9e-16, maxiter=200)
    raise TangentialCrossing(
        "trajectory never separates from the boundary (tangential start)")


def extend_and_find(fun, t0, t1, n, inside_sign, max_doublings=6):
    """Run :func:`first_crossing` on [t0, t1], doubling the window as needed."""
    lo, hi = t0, t1
    for _ in range(max_doublings + 1):
        res = first_crossing(fun, np.linspace(lo, hi, n), inside_sign)
        if res is not None:
            return res
        lo, hi = hi - (hi - lo) / 8, hi + (hi - lo) * 2
    raise EventDetectionFailed(
        f"no boundary crossing located in parameter window [{t0}, {hi}]")
