"""
Value types shared by every layer of the simulator.

A PeakonState keeps the leftmost position (the anchor) and the N-1 gaps
between neighbouring peakons instead of N absolute positions. Strict ordering
is then simply "every gap > 0", and a gap that decays towards zero keeps its
full relative precision. Absolute positions are derived on demand.
"""

from dataclasses import dataclass

import numpy as np

from errors import OrderingError

ACTIVE = "active"
ZERO_MOMENTUM = "zero-momentum"


@dataclass(frozen=True)
class FieldSample:
    x: float
    u: float
    ux_left: float
    ux_right: float


class PeakonState:
    __slots__ = ("t", "anchor", "gaps", "momenta", "m0")

    def __init__(self, t, anchor, gaps, momenta, m0=None, strict=True):
        momenta = np.array(momenta, dtype=float).reshape(-1)
        gaps = np.array(gaps, dtype=float).reshape(-1)
        if momenta.size < 1:
            raise ValueError("a peakon state needs at least one peakon")
        if gaps.size != momenta.size - 1:
            raise ValueError(
                f"{momenta.size} peakons need {momenta.size - 1} gaps, got {gaps.size}"
            )
        if not (np.all(np.isfinite(momenta)) and np.isfinite(anchor)):
            raise ValueError("momenta and positions must be finite")
        if not np.all(np.isfinite(gaps)):
            raise ValueError("gaps must be finite")
        if strict and np.any(gaps <= 0.0):
            k = int(np.argmax(gaps <= 0.0))
            raise OrderingError(
                f"positions not strictly increasing at t={t!r}: "
                f"gap between peakons {k + 1} and {k + 2} is {gaps[k]!r}"
            )
        self.t = float(t)
        self.anchor = float(anchor)
        self.gaps = gaps
        self.momenta = momenta
        self.m0 = float(np.sum(np.abs(momenta))) if m0 is None else float(m0)
        self.gaps.setflags(write=False)
        self.momenta.setflags(write=False)

    @classmethod
    def from_positions(cls, t, positions, momenta, m0=None):
        x = np.asarray(positions, dtype=float).reshape(-1)
        p = np.asarray(momenta, dtype=float).reshape(-1)
        if x.size != p.size:
            raise ValueError(
                f"got {x.size} positions but {p.size} momenta; lengths must match"
            )
        if x.size == 0:
            raise ValueError("a peakon state needs at least one peakon")
        if np.any(np.diff(x) <= 0.0):
            raise OrderingError(
                f"positions not strictly increasing: {[float(v) for v in x]}"
            )
        return cls(t, x[0], np.diff(x), p, m0)

    @property
    def n(self):
        return self.momenta.size

    @property
    def positions(self):
        return self.anchor + np.concatenate(([0.0], np.cumsum(self.gaps)))

    @property
    def coordinates(self):
        """(anchor, gap_1, ..., gap_{N-1}): the vector the integrators step."""
        return np.concatenate(([self.anchor], self.gaps))

    @property
    def zero_momentum(self):
        return self.momenta == 0.0

    @property
    def flags(self):
        return tuple(ZERO_MOMENTUM if z else ACTIVE for z in self.zero_momentum)

    @property
    def total_momentum(self):
        return float(np.sum(self.momenta))

    def moved(self, t, coordinates, strict=True):
        """Same peakons and momenta, new time and coordinates."""
        return PeakonState(
            t, coordinates[0], coordinates[1:], self.momenta, self.m0, strict
        )

    def stage(self, t, coordinates):
        """Unvalidated copy at new coordinates, for Runge-Kutta stage evaluations only."""
        out = object.__new__(PeakonState)
        out.t = t
        out.anchor = coordinates[0]
        out.gaps = coordinates[1:]
        out.momenta = self.momenta
        out.m0 = self.m0
        return out

    def pair_distances(self):
        """|x_i - x_j| for all pairs, accumulated from the gaps."""
        s = np.concatenate(([0.0], np.cumsum(self.gaps)))
        return np.abs(s[:, None] - s[None, :])

    def __reduce__(self):
        # rebuilt through __init__ so the arrays come back read-only
        return (PeakonState, (self.t, self.anchor, self.gaps, self.momenta, self.m0, False))

    def __repr__(self):
        return (
            f"PeakonState(t={self.t!r}, positions={self.positions.tolist()!r}, "
            f"momenta={self.momenta.tolist()!r})"
        )


def velocities_from_rates(rates):
    """Converts (anchor rate, gap rates) into per-peakon velocities."""
    rates = np.asarray(rates, dtype=float)
    return rates[0] + np.concatenate(([0.0], np.cumsum(rates[1:])))
