"""
Checks a finished trajectory against the defining properties of a
conservative peakon solution: the weak formulation, energy conservation,
and the two splitting experiments (mCH splitting gives a second solution,
CH splitting does not).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

import dynamics
import kernel
import quadrature
from debugcolor import co, say
from errors import QuadratureError
from integrate import SimConfig, evolve_ch
from state import PeakonState
from sticky import evolve_sticky

SPLIT_MOMENTA = (5.0, -4.0, 3.0)
SPLIT_TIMES = (0.0, 0.1, 0.25, 0.5)


@dataclass(frozen=True)
class QuadConfig:
    order: int = 8
    panels: int = 4
    time_panels: int = 16
    tol: float = 1e-6
    strict: bool = False
    debug: bool = False

    def __post_init__(self):
        if self.order < 2 or self.panels < 1 or self.time_panels < 1:
            raise ValueError(
                f"need order >= 2 and at least one panel, got "
                f"order={self.order}, panels={self.panels}, time_panels={self.time_panels}"
            )
        if not self.tol > 0.0:
            raise ValueError(f"tol must be > 0, got {self.tol!r}")


@dataclass(frozen=True)
class TestFunction:
    """phi(x, t) = (1 - t/T)^k (1 - ((x - c)/w)^2)^k, zero outside its support.

    k = 5 keeps phi_txx and phi_xxx continuous.
    """

    __test__ = False

    t_end: float
    center: float
    half_width: float
    power: int = 5

    def __post_init__(self):
        if self.t_end <= 0.0 or self.half_width <= 0.0:
            raise ValueError("test function needs positive t_end and half_width")
        if self.power < 4:
            raise ValueError(f"power must be >= 4, got {self.power}")

    def chi(self, t, order=0):
        tau = np.asarray(t, dtype=float) / self.t_end
        poly = Polynomial([1.0, -1.0]) ** self.power
        value = poly.deriv(order)(tau) / self.t_end**order if order else poly(tau)
        return np.where(tau < 1.0, value, 0.0)

    def psi(self, x, order=0):
        z = (np.asarray(x, dtype=float) - self.center) / self.half_width
        poly = Polynomial([1.0, 0.0, -1.0]) ** self.power
        value = poly.deriv(order)(z) / self.half_width**order if order else poly(z)
        return np.where(np.abs(z) < 1.0, value, 0.0)

    def phi(self, x, t):
        return self.chi(t) * self.psi(x)

    @property
    def support(self):
        return self.center - self.half_width, self.center + self.half_width


@dataclass(frozen=True)
class ResidualReport:
    value: float
    terms: dict
    initial_term: float
    error_estimate: float
    converged: bool


@dataclass(frozen=True)
class EnergyAudit:
    initial: float
    max_drift: float
    energies: np.ndarray
    jumps: tuple  # (t, |H(t+) - H(t-)|) per merge


@dataclass(frozen=True)
class SplittingReport:
    rows: tuple  # (t, L2 field distance, H single, H split)
    initial_velocities: tuple


@dataclass(frozen=True)
class CHSplittingReport:
    passed: bool
    separation: float
    position_error: float
    momentum_error: float
    hamiltonian_drift: float
    details: dict = field(default_factory=dict)


# ============================================================================ #
#                               Weak formulation                               #
# ============================================================================ #


class WeakResidual:
    def debug_print(self, statement):
        if self.debug:
            say(co("[VERIFY]" + str(statement), "blue", "bold"))

    def error_print(self, statement):
        say(co("[VERIFY]" + str(statement), "red", "bold"))

    def __init__(self, quad=None):
        self.quad = QuadConfig() if quad is None else quad
        self.debug = self.quad.debug

    def _terms(self, traj, phi, panels, time_panels):
        q = self.quad
        t0 = traj.initial.t
        t_stop = min(phi.t_end, traj.t_final)
        breaks = [t0] + [e.t for e in traj.events if t0 < e.t < t_stop] + [t_stop]
        t_nodes, t_weights = quadrature.panel_rule(breaks, q.order, time_panels)
        lo, hi = phi.support
        totals = np.zeros(3)
        for t, wt in zip(t_nodes, t_weights):
            _, x, p = traj.epoch_state_at(t)
            inner = x[(x > lo) & (x < hi)]
            xs, wx = quadrature.panel_rule(
                np.concatenate(([lo], inner, [hi])), q.order, panels
            )
            u, ux, _ = kernel.field_arrays(x, p, xs)
            chi, chi_t = phi.chi(t), phi.chi(t, 1)
            psi1, psi2, psi3 = phi.psi(xs, 1), phi.psi(xs, 2), phi.psi(xs, 3)
            phi_t = chi_t * phi.psi(xs)
            i1 = np.sum(wx * u * (phi_t - chi_t * psi2))
            i2 = np.sum(wx * ((u**3 + 2.0 * u * ux**2) * chi * psi1 - u**3 * chi * psi3 / 3.0))
            _, left, right = kernel.peak_arrays(np.abs(x[:, None] - x[None, :]), p)
            bar_sq = 0.5 * (left**2 + right**2)
            i3 = -np.sum(p * bar_sq * chi * phi.psi(x, 1))
            totals += wt * np.array([i1, i2, i3])
        return totals

    def evaluate(self, traj, phi):
        if phi.t_end > traj.t_final + 1e-12:
            raise ValueError(
                f"test function lives until t={phi.t_end!r} but the trajectory ends "
                f"at t={traj.t_final!r}"
            )
        q = self.quad
        init = traj.initial
        initial_term = float(np.sum(init.momenta * phi.phi(init.positions, init.t)))
        coarse = self._terms(traj, phi, q.panels, q.time_panels)
        fine = self._terms(traj, phi, 2 * q.panels, 2 * q.time_panels)
        estimate = abs(float(np.sum(fine) - np.sum(coarse)))
        value = abs(float(np.sum(fine)) + initial_term)
        converged = estimate <= q.tol
        report = ResidualReport(
            value,
            {"I1": float(fine[0]), "I2": float(fine[1]), "I3": float(fine[2])},
            initial_term,
            estimate,
            converged,
        )
        self.debug_print(f"residual {value:.3e}, panel-doubling change {estimate:.3e}")
        if not converged:
            self.error_print(
                f"quadrature did not settle: panel doubling changed the functional "
                f"by {estimate:.3e} > tol {q.tol:.1e}"
            )
            if q.strict:
                raise QuadratureError(
                    f"weak residual quadrature not converged ({estimate:.3e} > {q.tol:.1e})"
                )
        return report


def weak_residual(traj, phi, quad=None):
    return WeakResidual(quad).evaluate(traj, phi)


# ============================================================================ #
#                                 Energy audit                                 #
# ============================================================================ #


def energy_audit(traj):
    energies = np.array([kernel.energy(s) for s in traj.samples])
    h0 = kernel.energy(traj.initial)
    scale = abs(h0) if h0 != 0.0 else 1.0
    drift = float(np.max(np.abs(energies - h0))) / scale if energies.size else 0.0
    jumps = tuple((e.t, e.energy_jump) for e in traj.events)
    return EnergyAudit(h0, drift, energies, jumps)


# ============================================================================ #
#                             Splitting experiments                            #
# ============================================================================ #


def field_distance(xa, pa, xb, pb, order=16, panels=8):
    """L2 distance between two peakon fields."""
    pts = np.concatenate((xa, xb))
    breaks = np.concatenate(([pts.min() - kernel.TAIL], pts, [pts.max() + kernel.TAIL]))

    def sq(xs):
        ua, _, _ = kernel.field_arrays(xa, pa, xs)
        ub, _, _ = kernel.field_arrays(xb, pb, xs)
        return (ua - ub) ** 2

    return math.sqrt(max(0.0, quadrature.integrate(sq, breaks, order, panels)))


def splitting_demo(config=None, times=SPLIT_TIMES):
    """One peakon p=4 at rest against (5, -4, 3) split from the same point.

    Both start from the same momentum measure, both conserve energy, and
    their fields separate immediately.
    """
    t_end = max(times)
    config = SimConfig(t_end=t_end) if config is None else config.with_changes(t_end=t_end)
    gap = 10.0 * config.merge_gap_tol
    total = float(np.sum(SPLIT_MOMENTA))
    single = PeakonState.from_positions(0.0, [0.0], [total])
    split = PeakonState.from_positions(0.0, [-gap, 0.0, gap], SPLIT_MOMENTA)
    a = evolve_sticky(single, config)
    b = evolve_sticky(split, config)
    rows = []
    for t in times:
        if t == 0.0:
            xa, pa = single.positions, single.momenta
            xb, pb = np.zeros(3), np.array(SPLIT_MOMENTA)
            h_b = kernel.coincident_energy(pb)
        else:
            _, xa, pa = a.epoch_state_at(t)
            _, xb, pb = b.epoch_state_at(t)
            h_b = kernel.energy_arrays(xb, pb)
        rows.append((float(t), field_distance(xa, pa, xb, pb), kernel.energy_arrays(xa, pa), h_b))
    velocities = tuple(float(v) for v in dynamics.mch_conservative_rhs(split))
    return SplittingReport(tuple(rows), velocities)


def ch_splitting_demo(c=4.0, split=(3.0, 1.0), x0=0.0, t_end=2.0, dt=1e-3, tol=1e-8):
    """Two CH peakons started on top of each other stay the single peakon c e^{-|x - ct|}."""
    if not math.isclose(sum(split), c, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError(f"split {split} does not sum to c={c!r}")
    run = evolve_ch([x0, x0], split, SimConfig(dt=dt, t_end=t_end))
    x_end, p_end = run.positions[-1], run.momenta[-1]
    exact = c * t_end + x0
    h0 = run.hamiltonian[0]
    separation = float(abs(x_end[0] - x_end[1]))
    position_error = float(np.max(np.abs(x_end - exact)))
    momentum_error = float(abs(np.sum(p_end) - c))
    drift = float(np.max(np.abs(run.hamiltonian - h0)) / max(abs(h0), 1.0))
    passed = bool(
        separation <= tol
        and position_error <= 1e-6
        and momentum_error <= tol
        and drift <= tol
    )
    return CHSplittingReport(
        passed,
        separation,
        position_error,
        momentum_error,
        drift,
        {"c": c, "split": tuple(split), "x0": x0, "t_end": t_end},
    )
