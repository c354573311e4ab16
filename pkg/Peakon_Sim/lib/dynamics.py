"""
Right-hand sides of the peakon systems and the algebraic identities they obey.

Between neighbouring peakons u^2 - u_x^2 is constant; its value on the k-th
interval is C_k = sum_{i<=k<j} p_i p_j exp(x_i - x_j). A conservative peakon
moves with the average of the two constants beside it. Every pairwise
exponential is taken with a non-positive exponent.

Flows return rates in state coordinates: (d anchor/dt, d gap_1/dt, ...).
"""

from dataclasses import dataclass

import numpy as np

import kernel
from errors import OrderingError


@dataclass(frozen=True)
class IntervalConstants:
    values: np.ndarray  # C_0 .. C_N, C_0 = C_N = 0


@dataclass(frozen=True)
class PairCouplings:
    a: np.ndarray  # a_ij = p_i p_j exp(-|x_i - x_j|) / 2


def _require_ordered(state):
    if np.any(state.gaps <= 0.0):
        raise OrderingError(f"positions not strictly increasing: {state!r}")


def _require_pairs(state):
    if state.n < 2:
        raise ValueError(f"identity needs at least two peakons, got {state.n}")


def interval_constants(state):
    """C_0..C_N from the full pairwise table (robust path)."""
    _require_ordered(state)
    return raw_interval_constants(state)


def raw_interval_constants(state):
    """interval_constants without the ordering check.

    Integrator stages may evaluate slightly crossed states while a collision is
    being bracketed; there exp(-|x_i - x_j|) stands in for exp(x_i - x_j).
    """
    p = state.momenta
    pairs = np.triu(np.outer(p, p) * np.exp(-state.pair_distances()), 1)
    # moving the split past peakon k adds its pairs to the right and drops
    # its pairs to the left
    step = pairs.sum(axis=1) - pairs.sum(axis=0)
    c = np.zeros(state.n + 1)
    c[1:-1] = np.cumsum(step)[:-1]
    return IntervalConstants(c)


def interval_constants_fast(state):
    """C_0..C_N in O(N) from prefix and suffix sums.

    L_k = sum_{i<=k} p_i exp(x_i - x_k) and R_k = sum_{j>k} p_j exp(x_k - x_j)
    are renormalised at every peakon, so no exponent is ever positive.
    """
    _require_ordered(state)
    p = state.momenta
    decay = np.exp(-state.gaps)
    n = state.n
    left = np.empty(n)
    right = np.zeros(n)
    left[0] = p[0]
    for k in range(1, n):
        left[k] = left[k - 1] * decay[k - 1] + p[k]
    for k in range(n - 2, -1, -1):
        right[k] = (right[k + 1] + p[k + 1]) * decay[k]
    c = np.zeros(n + 1)
    c[1:-1] = (left * right)[:-1]
    return IntervalConstants(c)


def mch_conservative_rhs(state):
    c = interval_constants(state).values
    return 0.5 * (c[:-1] + c[1:])


def mch_nonconservative_rhs(state):
    return mch_conservative_rhs(state) + state.momenta**2 / 6.0


def conservative_flow(state):
    """Anchor and gap rates of the conservative system.

    Gap k grows at (C_{k+1} - C_{k-1}) / 2.
    """
    c = raw_interval_constants(state).values
    return np.concatenate(([0.5 * c[1]], 0.5 * (c[2:] - c[:-2])))


def nonconservative_flow(state):
    rates = conservative_flow(state)
    sq = state.momenta**2 / 6.0
    rates[0] += sq[0]
    rates[1:] += sq[1:] - sq[:-1]
    return rates


def ch_rhs(positions, momenta):
    """Camassa-Holm peakon system, sgn(0) = 0.

    Positions need not be ordered; coincident peakons exert no force on each
    other.
    """
    x = np.asarray(positions, dtype=float)
    p = np.asarray(momenta, dtype=float)
    d = x[:, None] - x[None, :]
    e = np.exp(-np.abs(d))
    dx = e @ p
    dp = p * ((np.sign(d) * e) @ p)
    return dx, dp


def ch_hamiltonian(positions, momenta):
    return kernel.energy_arrays(positions, momenta)


def pair_couplings(state):
    p = state.momenta
    return PairCouplings(0.5 * np.outer(p, p) * np.exp(-state.pair_distances()))


def speed_table(couplings):
    """A_k = sum_{j != k} a_jk + 2 sum_{m<k<n} a_mn, straight from the pair table.

    Computed without interval_constants; A_k is the conservative velocity of
    peakon k.
    """
    a = couplings.a
    n = a.shape[0]
    off = a - np.diag(np.diag(a))
    speeds = off.sum(axis=0)
    for k in range(n):
        speeds[k] += 2.0 * a[:k, k + 1 :].sum()
    return speeds


def alternating_identity_residual(state):
    _require_pairs(state)
    _require_ordered(state)
    speeds = speed_table(pair_couplings(state))
    signs = np.where(np.arange(state.n) % 2 == 0, 1.0, -1.0)
    return float(np.sum(signs * speeds))


def energy_identity_residual(state):
    """sum_{i<j} a_ij (A_i - A_j); vanishes because dH/dt = 0 along the flow."""
    _require_pairs(state)
    _require_ordered(state)
    couplings = pair_couplings(state)
    speeds = speed_table(couplings)
    spread = speeds[:, None] - speeds[None, :]
    return float(np.sum(np.triu(couplings.a * spread, 1)))


def nonconservative_singular_value(state):
    """(1/3)[bar(u_x^2) + 2 bar(u_x)^2] at every peakon.

    This is the value the non-conservative system assigns to u_x^2 at a peak;
    u^2 minus it gives the non-conservative velocity.
    """
    samples = kernel.peak_samples(state)
    sq = np.array([0.5 * (s.ux_left**2 + s.ux_right**2) for s in samples])
    avg = np.array([0.5 * (s.ux_left + s.ux_right) for s in samples])
    return (sq + 2.0 * avg**2) / 3.0


def peak_speed_formula(state, conservative=True):
    """u^2 - bar(u_x^2) (or its non-conservative analogue) at every peakon."""
    samples = kernel.peak_samples(state)
    u_sq = np.array([s.u**2 for s in samples])
    if conservative:
        return u_sq - np.array([0.5 * (s.ux_left**2 + s.ux_right**2) for s in samples])
    return u_sq - nonconservative_singular_value(state)
