"""
Composite Gauss-Legendre rules on breakpoint-split intervals.

Peakon fields have kinks at every peakon position and the sticky trajectories
have kinks at every merge time, so every integral in the simulator is split at
those points and integrated panel by panel.
"""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss


@lru_cache(maxsize=None)
def _reference_rule(order):
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def panel_rule(breakpoints, order=8, panels=4):
    """Nodes and weights covering [min(breakpoints), max(breakpoints)].

    Every interval between consecutive distinct breakpoints is cut into
    `panels` equal panels carrying an `order`-point Gauss-Legendre rule.
    """
    if order < 1 or panels < 1:
        raise ValueError(f"order and panels must be >= 1, got {order}, {panels}")
    b = np.unique(np.asarray(breakpoints, dtype=float))
    if b.size < 2:
        return np.empty(0), np.empty(0)
    nodes, weights = _reference_rule(order)
    frac = np.linspace(0.0, 1.0, panels + 1)
    width = b[1:] - b[:-1]
    lo = (b[:-1, None] + width[:, None] * frac[None, :-1]).ravel()
    hi = (b[:-1, None] + width[:, None] * frac[None, 1:]).ravel()
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * nodes[None, :]
    w = half[:, None] * weights[None, :]
    return x.ravel(), w.ravel()


def integrate(f, breakpoints, order=8, panels=4):
    """Integrates a vectorised f over the span of the breakpoints."""
    x, w = panel_rule(breakpoints, order, panels)
    if x.size == 0:
        return 0.0
    return float(np.sum(w * f(x)))
