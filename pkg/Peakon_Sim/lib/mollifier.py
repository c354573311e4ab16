"""
Mollifier families and the regularized peakon vector field.

Every profile rho is even, nonnegative, supported in (-1, 1), has unit mass
and is nondecreasing on (-1, 0); rho_eps(s) = rho(s/eps)/eps. The regularized
field is the exact convolution of rho_eps with the piecewise-constant
u^2 - u_x^2, i.e. a sum of C_k times the rho_eps mass of each interval.

Masses are computed from (start, width) pairs, never as a difference of two
CDF values taken far apart, so the mass of a tiny interval keeps its relative
precision. A gap that shrinks like exp(-c t / eps) therefore stays positive.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import CubicHermiteSpline

import dynamics
import quadrature

COSINE = "cosine_bump"
QUADRATIC = "quadratic_bump"
SMOOTH_EXP = "smooth_exp_bump"
FAMILIES = (COSINE, QUADRATIC, SMOOTH_EXP)

TABLE_NODES = 10_001
SMALL_WIDTH = 1e-3


@dataclass(frozen=True)
class MollifierSpec:
    family: str = COSINE
    eps: float = 0.05

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown mollifier family {self.family!r}, expected one of {FAMILIES}"
            )
        if not (np.isfinite(self.eps) and self.eps > 0.0):
            raise ValueError(f"mollifier width must be > 0, got {self.eps!r}")


# ============================================================================ #
#                             Unit-width profiles                              #
# ============================================================================ #


def _cos_density(s):
    return np.where(np.abs(s) < 1.0, 0.5 * (1.0 + np.cos(np.pi * s)), 0.0)


def _cos_cdf(s):
    return (s + 1.0) / 2.0 + np.sin(np.pi * s) / (2.0 * np.pi)


def _cos_mass(a, w):
    m = a + 0.5 * w
    return 0.5 * w * (1.0 + np.cos(np.pi * m) * np.sinc(0.5 * w))


def _quad_density(s):
    return np.where(np.abs(s) < 1.0, 0.75 * (1.0 - s * s), 0.0)


def _quad_cdf(s):
    return 0.5 + (3.0 * s - s**3) / 4.0


def _quad_mass(a, w):
    m = a + 0.5 * w
    return 0.75 * w * (1.0 - m * m - w * w / 12.0)


def _exp_raw(s):
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1.0
    safe = np.where(inside, 1.0 - s * s, 1.0)
    return np.where(inside, np.exp(-1.0 / safe), 0.0)


class _ExpBumpTable:
    """CDF of the C-infinity bump exp(-1/(1-s^2)), tabulated on [0, 1].

    Each table cell is integrated with Gauss-Legendre. Accumulating the cells
    from 0 gives the right half, read through a cubic Hermite spline whose
    slopes are the exact density. Accumulating them from 1 gives the tail mass
    beyond each node; the left half is that tail plus the uncovered part of
    one cell, integrated on the spot, so CDF values near -1 keep their
    relative precision. Built once, read-only afterwards.
    """

    def __init__(self, nodes=TABLE_NODES, order=8):
        s = np.linspace(0.0, 1.0, nodes)
        gl_nodes, gl_weights = leggauss(order)
        half = 0.5 * (s[1:] - s[:-1])
        mid = 0.5 * (s[1:] + s[:-1])
        pts = mid[:, None] + half[:, None] * gl_nodes[None, :]
        cells = (half[:, None] * gl_weights[None, :] * _exp_raw(pts)).sum(axis=1)
        running = np.concatenate(([0.0], np.cumsum(cells)))
        self.norm = 2.0 * running[-1]
        values = 0.5 + running / self.norm
        values[0] = 0.5
        values[-1] = 1.0
        self.spline = CubicHermiteSpline(s, values, _exp_raw(s) / self.norm)
        self.nodes = s
        self.tail = np.concatenate((np.cumsum(cells[::-1])[::-1], [0.0]))
        self.gl_nodes = gl_nodes
        self.gl_weights = gl_weights

    def density(self, s):
        return _exp_raw(s) / self.norm

    def cdf_right(self, s):
        return self.spline(np.clip(s, 0.0, 1.0))

    def cdf_left(self, s):
        """CDF at -s for s in [0, 1]."""
        shape = np.shape(s)
        s = np.clip(np.asarray(s, dtype=float).ravel(), 0.0, 1.0)
        j = np.minimum(np.searchsorted(self.nodes, s, side="right"), self.nodes.size - 1)
        upper = self.nodes[j]
        half = 0.5 * (upper - s)
        pts = (0.5 * (upper + s))[:, None] + half[:, None] * self.gl_nodes[None, :]
        part = half * (self.gl_weights[None, :] * _exp_raw(pts)).sum(axis=1)
        return ((self.tail[j] + part) / self.norm).reshape(shape)


@lru_cache(maxsize=1)
def exp_table():
    return _ExpBumpTable()


def _exp_density(s):
    return exp_table().density(s)


def _exp_cdf(s):
    table = exp_table()
    s = np.asarray(s, dtype=float)
    return np.where(s >= 0.0, table.cdf_right(s), table.cdf_left(-s))


_gl3_nodes, _gl3_weights = leggauss(3)


def _exp_mass(a, w):
    m = a + 0.5 * w
    half = 0.5 * w
    pts = m[..., None] + half[..., None] * _gl3_nodes
    short = half * (_gl3_weights * _exp_density(pts)).sum(axis=-1)
    long = _exp_cdf(np.clip(a + w, -1.0, 1.0)) - _exp_cdf(np.clip(a, -1.0, 1.0))
    return np.where(w <= SMALL_WIDTH, short, long)


# family -> (density, cdf on [-1, 1], mass of [a, a + w] inside [-1, 1])
_PROFILES = {
    COSINE: (_cos_density, _cos_cdf, _cos_mass),
    QUADRATIC: (_quad_density, _quad_cdf, _quad_mass),
    SMOOTH_EXP: (_exp_density, _exp_cdf, _exp_mass),
}


def _check(spec):
    if not (np.isfinite(spec.eps) and spec.eps > 0.0):
        raise ValueError(f"mollifier width must be > 0, got {spec.eps!r}")
    return _PROFILES[spec.family]


def _scalar_or_array(value, like):
    return float(value) if np.ndim(like) == 0 else value


# ============================================================================ #
#                                  Public API                                  #
# ============================================================================ #


def density(spec, s):
    rho, _, _ = _check(spec)
    s = np.asarray(s, dtype=float)
    return _scalar_or_array(rho(s / spec.eps) / spec.eps, s)


def cdf(spec, s):
    """Phi_eps(s) = int_{-eps}^{s} rho_eps; 0 below -eps, 1 above eps."""
    _, phi, _ = _check(spec)
    s = np.asarray(s, dtype=float)
    unit = s / spec.eps
    inside = np.clip(unit, -1.0, 1.0)
    value = np.where(unit <= -1.0, 0.0, np.where(unit >= 1.0, 1.0, phi(inside)))
    return _scalar_or_array(value, s)


def interval_mass(spec, start, width):
    """rho_eps mass of [start, start + width]; negative width gives negative mass."""
    _, _, mass = _check(spec)
    a = np.asarray(start, dtype=float) / spec.eps
    return _unit_mass(mass, a, np.asarray(width, dtype=float) / spec.eps)


def _unit_mass(mass, a, w):
    # an interval inside [-1, 1] keeps its width exactly; only the parts
    # hanging over either end are cut off
    sign = np.where(w < 0.0, -1.0, 1.0)
    a = np.minimum(a, a + w)
    w = np.abs(w)
    cut_left = np.maximum(-1.0 - a, 0.0)
    cut_right = np.maximum(a + w - 1.0, 0.0)
    w_eff = np.maximum(w - cut_left - cut_right, 0.0)
    return sign * mass(a + cut_left, w_eff)


def _offsets(state):
    # x_i - x_{j+1} for every peakon i and every interval j
    s = np.concatenate(([0.0], np.cumsum(state.gaps)))
    return s[:, None] - s[None, 1:]


def regularized_field(state, spec, x):
    """sum_k C_k [Phi_eps(x - x_k) - Phi_eps(x - x_{k+1})] at x (scalar or array)."""
    _check(spec)
    c = dynamics.interval_constants(state).values[1:-1]
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if c.size == 0:
        out = np.zeros_like(xs)
    else:
        start = xs[:, None] - state.positions[None, 1:]
        out = interval_mass(spec, start, state.gaps[None, :]) @ c
    return _scalar_or_array(out[0], x) if np.ndim(x) == 0 else out


def regularized_rhs(state, spec):
    _check(spec)
    c = dynamics.interval_constants(state).values[1:-1]
    if c.size == 0:
        return np.zeros(1)
    return interval_mass(spec, _offsets(state), state.gaps[None, :]) @ c


def regularized_flow(spec):
    """Anchor and gap rates of the regularized system for a fixed mollifier.

    Gap k changes at sum_j C_j [W(a + g_j, g_k) - W(a, g_k)] with
    a = x_k - x_{j+1}; both masses scale with g_k, so the rate does too.
    """
    _, _, mass = _check(spec)
    scale = 1.0 / spec.eps

    def flow(state):
        c = dynamics.raw_interval_constants(state).values[1:-1]
        m = c.size
        if m == 0:
            return np.zeros(1)
        # one mass evaluation per stage: row 0 is the anchor, then the
        # shifted and base rows of every gap
        g = state.gaps * scale
        s = np.concatenate(([0.0], np.cumsum(g)))
        a = s[:-1, None] - s[None, 1:]
        starts = np.concatenate((a[:1], a + g[None, :], a))
        per_row = np.broadcast_to(g[:, None], (m, m))
        widths = np.concatenate((g[None, :], per_row, per_row))
        w = _unit_mass(mass, starts, widths) @ c
        return np.concatenate((w[:1], w[1 : m + 1] - w[m + 1 :]))

    return flow


def regularized_field_by_quadrature(state, spec, x, order=32, panels=32):
    """int rho_eps(x - y) U(y) dy by Gauss-Legendre; independent of the CDFs."""
    c = dynamics.interval_constants(state).values
    pos = state.positions
    inner = pos[(pos > x - spec.eps) & (pos < x + spec.eps)]
    breakpoints = np.concatenate(([x - spec.eps], inner, [x + spec.eps]))

    def integrand(y):
        slot = np.searchsorted(pos, y, side="right")
        return density(spec, x - y) * c[slot]

    return quadrature.integrate(integrand, breakpoints, order, panels)


def midpoint_property_residual(spec, left, right):
    """|(rho_eps * f)(0) - (f(0-) + f(0+))/2| for the step f = left | right."""
    below = cdf(spec, 0.0) - cdf(spec, -spec.eps)
    above = cdf(spec, spec.eps) - cdf(spec, 0.0)
    return abs(left * below + right * above - 0.5 * (left + right))
