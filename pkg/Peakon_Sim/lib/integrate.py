"""
Fixed-step RK4 time stepping with collision detection.

A step that ends with a crossed gap, or with a closing gap below
merge_gap_tol, is bisected by re-stepping from the last accepted state with
a shorter step until the bracket is narrower than bisect_tol. The tolerance
only triggers the event: the closing pairs are then carried on to contact,
bisecting on the sign of their gaps, so a merge removes a gap of order
|closing speed| * bisect_tol. The event state is a state RK4 actually reaches,
not an interpolant.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from debugcolor import co, say
from errors import IntegratorError, OrderingError, StepSizeError
from state import PeakonState
import dynamics

ORDERING_BREACH = "ordering_breach"
GAP_BELOW_TOL = "gap_below_tol"
MAX_BISECTIONS = 200
CONTACT_WIDENINGS = 8


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-3
    t_end: float = 2.0
    merge_gap_tol: float = 1e-9
    bisect_tol: float = 1e-12
    sample_every: int = 1
    debug: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.dt) and self.dt > 0.0):
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if not math.isfinite(self.t_end) or self.dt > self.t_end:
            raise ValueError(f"dt={self.dt!r} must not exceed t_end={self.t_end!r}")
        if not self.merge_gap_tol > 0.0:
            raise ValueError(f"merge_gap_tol must be > 0, got {self.merge_gap_tol!r}")
        if not 0.0 < self.bisect_tol < self.dt:
            raise ValueError(
                f"bisect_tol must lie in (0, dt), got {self.bisect_tol!r} for dt={self.dt!r}"
            )
        if int(self.sample_every) != self.sample_every or self.sample_every < 1:
            raise ValueError(f"sample_every must be an integer >= 1, got {self.sample_every!r}")

    def with_changes(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class EventReport:
    kind: str
    t_event: float
    indices: tuple  # (k, k + 1) pairs, 0-based within the current state
    closing_speeds: tuple  # d gap / dt of each reported pair at t_event


@dataclass
class Segment:
    samples: list
    event: EventReport = None
    final: PeakonState = None


def rounding_floor(state):
    """Smallest merge_gap_tol that positions of this size can resolve."""
    scale = max(1.0, float(np.max(np.abs(state.positions))))
    return 1e2 * np.finfo(float).eps * scale, scale


def rk4(rhs, t, h, y, p):
    """One classical Runge-Kutta step of y' = rhs(t, y, p)."""
    k1 = rhs(t, y, p)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1, p)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2, p)
    k4 = rhs(t + h, y + h * k3, p)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _state_rates(t, y, payload):
    flow, template = payload
    return flow(template.stage(t, y))


def rk4_step(flow, state, dt):
    """Advances a PeakonState by one RK4 step of the given flow.

    Raises OrderingError if the step ends with a crossed gap.
    """
    y = rk4(_state_rates, state.t, dt, state.coordinates, (flow, state))
    return state.moved(state.t + dt, y)


class Integrator:
    def debug_print(self, statement):
        if self.debug:
            say(co("[INTEGRATE]" + str(statement), "teal", "bold"))

    def error_print(self, statement):
        say(co("[INTEGRATE]" + str(statement), "red", "bold"))

    def __init__(self, flow, config):
        self.flow = flow
        self.config = config
        self.debug = config.debug
        self.steps = 0

    def advance(self, state, h, t_next=None):
        y = rk4(_state_rates, state.t, h, state.coordinates, (self.flow, state))
        t_next = state.t + h if t_next is None else t_next
        return state.moved(t_next, y, strict=False)

    def triggered(self, state):
        gaps = state.gaps
        if np.any(gaps <= 0.0):
            return True
        low = gaps <= self.config.merge_gap_tol
        if not np.any(low):
            return False
        closing = self.flow(state)[1:] < 0.0
        return bool(np.any(low & closing))

    def _check_tolerance(self, state):
        floor, scale = rounding_floor(state)
        if self.config.merge_gap_tol < floor:
            raise ValueError(
                f"merge_gap_tol={self.config.merge_gap_tol!r} is below the "
                f"rounding floor {floor:.3g} for positions of size {scale:.3g}"
            )

    def run(self, state, detect=True):
        """Steps from state to t_end, or until the first collision if detect."""
        cfg = self.config
        if detect:
            self._check_tolerance(state)
            if self.triggered(state):
                return self._event_at(state, [])
        samples = [state]
        count = 0
        while True:
            remaining = cfg.t_end - state.t
            if remaining <= 1e-12 * max(1.0, abs(cfg.t_end)):
                break
            if remaining <= cfg.dt * (1.0 + 1e-9):
                h, t_next = remaining, cfg.t_end
            else:
                h, t_next = cfg.dt, None
            trial = self.advance(state, h, t_next)
            self.steps += 1
            if detect and self.triggered(trial):
                return self._localize(state, h, samples)
            if np.any(trial.gaps <= 0.0):
                k = int(np.argmin(trial.gaps))
                raise IntegratorError(
                    f"ordering lost at t={trial.t!r}: gap {k + 1} is {trial.gaps[k]!r}; "
                    f"dt={cfg.dt!r} is too large for this flow"
                )
            state = trial.moved(trial.t, trial.coordinates)
            count += 1
            if count % cfg.sample_every == 0:
                samples.append(state)
        if samples[-1] is not state:
            samples.append(state)
        return Segment(samples, None, state)

    def _localize(self, start, h, samples):
        cfg = self.config
        lo, hi = 0.0, h
        iterations = 0
        while hi - lo > cfg.bisect_tol:
            iterations += 1
            if iterations > MAX_BISECTIONS:
                raise StepSizeError(
                    f"collision after t={start.t!r} not bracketed within "
                    f"{MAX_BISECTIONS} bisections"
                )
            mid = 0.5 * (lo + hi)
            if self.triggered(self.advance(start, mid)):
                hi = mid
            else:
                lo = mid
        self.debug_print(
            f"collision bracketed to [{start.t + lo!r}, {start.t + hi!r}] "
            f"after {iterations} bisections"
        )
        if samples and samples[-1] is not start:
            samples.append(start)
        return self._event_at(self.advance(start, hi), samples)

    def _contact(self, state):
        """Carries a triggered state forward to the moment its closing pairs touch.

        Bisects on the first closing gap changing sign and returns the last
        state before it does, so the touching gaps are below |rate| * bisect_tol.
        """
        cfg = self.config
        gaps = state.gaps
        if np.any(gaps <= 0.0):
            return state
        rates = self.flow(state)[1:]
        pairs = np.flatnonzero((gaps <= cfg.merge_gap_tol) & (rates < 0.0))
        if pairs.size == 0:
            return state
        hi = 2.0 * float(np.max(gaps[pairs] / -rates[pairs])) + cfg.bisect_tol
        for _ in range(CONTACT_WIDENINGS):
            if np.any(self.advance(state, hi).gaps[pairs] <= 0.0):
                break
            hi *= 2.0
        else:
            self.debug_print(f"pairs {pairs.tolist()} stopped closing short of contact")
            return state
        lo = 0.0
        while hi - lo > cfg.bisect_tol:
            mid = 0.5 * (lo + hi)
            if np.any(self.advance(state, mid).gaps[pairs] <= 0.0):
                hi = mid
            else:
                lo = mid
        if lo == 0.0:
            return state
        return self.advance(state, lo)

    def _event_at(self, raw, samples):
        tol = self.config.merge_gap_tol
        gaps = raw.gaps
        if np.any(gaps < -tol):
            k = int(np.argmin(gaps))
            raise StepSizeError(
                f"step overshot a collision at t={raw.t!r}: gap {k + 1} is "
                f"{gaps[k]!r}; reduce dt"
            )
        kind = ORDERING_BREACH if np.any(gaps <= 0.0) else GAP_BELOW_TOL
        raw = self._contact(raw)
        gaps = raw.gaps
        try:
            clamped = np.where(gaps <= 0.0, tol, gaps)
            event_state = raw.moved(raw.t, np.concatenate(([raw.anchor], clamped)))
        except OrderingError as e:
            raise StepSizeError(f"could not build the collision state at t={raw.t!r}") from e
        rates = self.flow(event_state)[1:]
        pairs = np.flatnonzero(event_state.gaps <= tol)
        report = EventReport(
            kind,
            event_state.t,
            tuple((int(k), int(k) + 1) for k in pairs),
            tuple(float(rates[k]) for k in pairs),
        )
        self.debug_print(f"{kind} at t={report.t_event!r}, pairs {report.indices}")
        return Segment(samples, report, event_state)


def evolve_until_event(flow, state, config):
    return Integrator(flow, config).run(state, detect=True)


def evolve_free(flow, state, config):
    """Runs to t_end with no collision handling; a crossed gap is an IntegratorError."""
    return Integrator(flow, config).run(state, detect=False)


# ============================================================================ #
#                         Camassa-Holm peakon stepping                         #
# ============================================================================ #


@dataclass(frozen=True)
class CHRun:
    times: np.ndarray
    positions: np.ndarray  # (samples, N)
    momenta: np.ndarray  # (samples, N)
    hamiltonian: np.ndarray


def _ch_rates(t, y, n):
    dx, dp = dynamics.ch_rhs(y[:n], y[n:])
    return np.concatenate((dx, dp))


def ch_step(positions, momenta, dt):
    x = np.asarray(positions, dtype=float)
    y = rk4(_ch_rates, 0.0, dt, np.concatenate((x, np.asarray(momenta, float))), x.size)
    return y[: x.size], y[x.size :]


def evolve_ch(positions, momenta, config, t0=0.0):
    x = np.asarray(positions, dtype=float)
    p = np.asarray(momenta, dtype=float)
    if x.size != p.size or x.size == 0:
        raise ValueError(f"got {x.size} positions and {p.size} momenta")
    n = x.size
    steps = int(math.ceil((config.t_end - t0) / config.dt - 1e-9))
    y = np.concatenate((x, p))
    times, xs, ps = [t0], [x.copy()], [p.copy()]
    for k in range(1, steps + 1):
        t = t0 + (k - 1) * config.dt
        h = min(config.dt, config.t_end - t)
        y = rk4(_ch_rates, t, h, y, n)
        if k % config.sample_every == 0 or k == steps:
            times.append(t0 + k * config.dt if k < steps else config.t_end)
            xs.append(y[:n].copy())
            ps.append(y[n:].copy())
    xs = np.array(xs)
    ps = np.array(ps)
    energy = np.array([dynamics.ch_hamiltonian(a, b) for a, b in zip(xs, ps)])
    return CHRun(np.array(times), xs, ps, energy)
