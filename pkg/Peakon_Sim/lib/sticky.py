"""
Sticky continuation of conservative peakons through collisions.

At a collision every chain of peakons closer than merge_gap_tol becomes one
peakon placed at the position of its leftmost member and carrying the summed
momentum; evolution then resumes under the same conservative system. A
Trajectory remembers, for every epoch between merges, which merged peakon
each original peakon belongs to.
"""

import bisect
import traceback
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicHermiteSpline

import dynamics
import kernel
from debugcolor import co, say
from errors import IntegratorError, OrderingError
from integrate import evolve_until_event
from state import PeakonState

PAIR_LEFT = "pair_left"
PAIR_RIGHT = "pair_right"
TRIPLE = "triple"


@dataclass(frozen=True)
class MergePartition:
    groups: tuple  # contiguous 0-based index tuples, left to right
    tol: float

    @property
    def representatives(self):
        return tuple(g[0] for g in self.groups)

    @property
    def is_trivial(self):
        return all(len(g) == 1 for g in self.groups)

    def owner(self):
        """Index of the group holding each peakon."""
        out = np.empty(sum(len(g) for g in self.groups), dtype=int)
        for k, group in enumerate(self.groups):
            out[list(group)] = k
        return out


@dataclass(frozen=True)
class MergeEvent:
    t: float
    partition: MergePartition
    pre_state: PeakonState
    post_state: PeakonState
    closing_speeds: tuple = ()

    @property
    def energy_jump(self):
        return abs(kernel.energy(self.post_state) - kernel.energy(self.pre_state))


class Trajectory:
    """Time samples, merge events and lineage of one simulation run.

    samples[s] belongs to epoch epoch_of_sample[s]; lineage[e][i] is the
    index, within epoch e, of the peakon that original peakon i has joined.
    """

    def __init__(self, initial, system="mch_conservative", velocity=None):
        self.initial = initial
        self.system = system
        self._velocity = velocity
        self.samples = []
        self.epoch_of_sample = []
        self.events = []
        self.lineage = [np.arange(initial.n)]
        self.epoch_start = [initial.t]
        self.stop_event = None
        self._splines = {}

    @property
    def times(self):
        return np.array([s.t for s in self.samples])

    @property
    def epochs(self):
        return len(self.lineage)

    @property
    def t_final(self):
        return self.samples[-1].t

    def velocity(self, state):
        if self._velocity is not None:
            return self._velocity(state)
        if self.system == "mch_nonconservative":
            return dynamics.mch_nonconservative_rhs(state)
        if self.system == "mch_conservative":
            return dynamics.mch_conservative_rhs(state)
        return None

    def add_samples(self, states):
        epoch = len(self.lineage) - 1
        for state in states:
            if self.samples and state.t <= self.samples[-1].t:
                continue
            self.samples.append(state)
            self.epoch_of_sample.append(epoch)
        self._splines.pop(epoch, None)

    def add_event(self, event):
        owner = event.partition.owner()
        self.lineage.append(owner[self.lineage[-1]])
        self.epoch_start.append(event.t)
        self.events.append(event)
        if self.samples and self.samples[-1].t >= event.t:
            self.samples.pop()
            self.epoch_of_sample.pop()
        self.samples.append(event.post_state)
        self.epoch_of_sample.append(len(self.lineage) - 1)
        self._splines.clear()

    def epoch_at(self, t):
        return max(0, bisect.bisect_right(self.epoch_start, t) - 1)

    def _nodes(self, epoch):
        states = [s for s, e in zip(self.samples, self.epoch_of_sample) if e == epoch]
        if epoch < len(self.events):
            states.append(self.events[epoch].pre_state)
        return states

    def _spline(self, epoch):
        if epoch not in self._splines:
            states = self._nodes(epoch)
            if len(states) < 2 or self.velocity(states[0]) is None:
                self._splines[epoch] = states
            else:
                times = np.array([s.t for s in states])
                xs = np.array([s.positions for s in states])
                vs = np.array([self.velocity(s) for s in states])
                self._splines[epoch] = CubicHermiteSpline(times, xs, vs, axis=0)
        return self._splines[epoch]

    def epoch_state_at(self, t):
        """(epoch, positions, momenta) at time t, in the indexing of that epoch."""
        if t < self.initial.t - 1e-12 or t > self.t_final + 1e-12:
            raise ValueError(
                f"t={t!r} outside the trajectory span [{self.initial.t!r}, {self.t_final!r}]"
            )
        epoch = self.epoch_at(t)
        spline = self._spline(epoch)
        if isinstance(spline, list):
            times = np.array([s.t for s in spline])
            k = int(np.argmin(np.abs(times - t)))
            x = spline[k].positions
            momenta = spline[k].momenta
        else:
            x = spline(t)
            momenta = self._nodes(epoch)[0].momenta
        return epoch, x, momenta

    def positions_at(self, t):
        """Positions of the original peakons at t; merged peakons share a value."""
        epoch, x, _ = self.epoch_state_at(t)
        return x[self.lineage[epoch]]

    def original_positions(self, s):
        """Sample s expanded to the original peakon indexing."""
        return self.samples[s].positions[self.lineage[self.epoch_of_sample[s]]]


# ============================================================================ #
#                               Merge procedure                                #
# ============================================================================ #


def detect_groups(state, tol):
    groups = [[0]]
    for k, gap in enumerate(state.gaps):
        if gap <= tol:
            groups[-1].append(k + 1)
        else:
            groups.append([k + 1])
    return MergePartition(tuple(tuple(g) for g in groups), float(tol))


def merge(event_state, partition):
    flat = [i for g in partition.groups for i in g]
    if flat != list(range(event_state.n)):
        raise OrderingError(
            f"partition {partition.groups} does not cover peakons 0..{event_state.n - 1} in order"
        )
    gaps = event_state.gaps
    for group in partition.groups:
        inner = gaps[group[0] : group[-1]]
        if np.any(inner > partition.tol):
            raise OrderingError(
                f"group {group} spans a gap larger than tol={partition.tol!r}"
            )
    for group in partition.groups[:-1]:
        if gaps[group[-1]] <= partition.tol:
            raise OrderingError(
                f"group {group} is not maximal: its right gap is {gaps[group[-1]]!r}"
            )
    reps = partition.representatives
    momenta = [event_state.momenta[list(g)].sum() for g in partition.groups]
    new_gaps = [gaps[reps[k] : reps[k + 1]].sum() for k in range(len(reps) - 1)]
    return PeakonState(
        event_state.t, event_state.anchor, new_gaps, momenta, event_state.m0
    )


def classify_triple_collision(event):
    """Which of the three collision patterns a first merge of three peakons is."""
    groups = event.partition.groups
    if event.pre_state.n != 3:
        raise ValueError(f"expected a three-peakon collision, got {event.pre_state.n}")
    if len(groups) == 1:
        return TRIPLE
    if len(groups[0]) == 2:
        return PAIR_LEFT
    return PAIR_RIGHT


# ============================================================================ #
#                               Global evolution                               #
# ============================================================================ #


class StickySolver:
    def debug_print(self, statement):
        if self.debug:
            say(co("[STICKY]" + str(statement), "pink", "bold"))

    def error_print(self, statement):
        say(co("[STICKY]" + str(statement), "red", "bold"))

    def __init__(self, config):
        self.config = config
        self.debug = config.debug

    def run(self, initial):
        cfg = self.config
        traj = Trajectory(initial, "mch_conservative")
        state = initial
        while True:
            try:
                segment = evolve_until_event(dynamics.conservative_flow, state, cfg)
            except IntegratorError as e:
                self.error_print("".join(traceback.format_exception(e)))
                raise
            traj.add_samples(segment.samples)
            if segment.event is None:
                traj.add_samples([segment.final])
                break
            if len(traj.events) >= initial.n - 1:
                raise IntegratorError(
                    f"more than {initial.n - 1} merges requested at t={segment.event.t_event!r}"
                )
            partition = detect_groups(segment.final, cfg.merge_gap_tol)
            post = merge(segment.final, partition)
            traj.add_event(
                MergeEvent(
                    segment.final.t,
                    partition,
                    segment.final,
                    post,
                    segment.event.closing_speeds,
                )
            )
            self.debug_print(
                f"merge at t={segment.final.t:.9f}: groups {partition.groups}, "
                f"momenta {post.momenta.tolist()}"
            )
            state = post
            if state.t >= cfg.t_end:
                break
        return traj


def evolve_sticky(initial, config):
    return StickySolver(config).run(initial)


def evolve_until_collision(initial, config, flow=None, system="mch_nonconservative"):
    """Runs a system with no sticky continuation and stops at its first collision."""
    flow = dynamics.nonconservative_flow if flow is None else flow
    traj = Trajectory(initial, system)
    segment = evolve_until_event(flow, initial, config)
    traj.add_samples(segment.samples)
    traj.add_samples([segment.final])
    traj.stop_event = segment.event
    return traj


# ============================================================================ #
#                                Speed checks                                  #
# ============================================================================ #


def _central_indices(traj):
    t = traj.times
    ep = traj.epoch_of_sample
    out = []
    for s in range(1, len(t) - 1):
        if not ep[s - 1] == ep[s] == ep[s + 1]:
            continue
        left, right = t[s] - t[s - 1], t[s + 1] - t[s]
        if abs(right - left) <= 1e-9 * right:
            out.append(s)
    return out


def speed_consistency(traj, sample_count=None):
    """Max |central-difference dx/dt - (u^2 - bar(u_x^2))(x)| over sampled peakons."""
    candidates = _central_indices(traj)
    if not candidates:
        return 0.0
    if sample_count is not None and sample_count < len(candidates):
        picks = np.linspace(0, len(candidates) - 1, sample_count).round().astype(int)
        candidates = [candidates[k] for k in np.unique(picks)]
    conservative = traj.system != "mch_nonconservative"
    worst = 0.0
    t = traj.times
    for s in candidates:
        before, here, after = traj.samples[s - 1], traj.samples[s], traj.samples[s + 1]
        fd = (after.positions - before.positions) / (t[s + 1] - t[s - 1])
        formula = dynamics.peak_speed_formula(here, conservative)
        worst = max(worst, float(np.max(np.abs(fd - formula))))
    return worst


def max_sample_speed(traj):
    """Largest |dx/dt| between consecutive samples of the same epoch."""
    worst = 0.0
    for s in range(1, len(traj.samples)):
        if traj.epoch_of_sample[s] != traj.epoch_of_sample[s - 1]:
            continue
        a, b = traj.samples[s - 1], traj.samples[s]
        speed = np.abs(b.positions - a.positions) / (b.t - a.t)
        worst = max(worst, float(np.max(speed)))
    return worst
