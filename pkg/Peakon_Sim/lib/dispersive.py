"""
Regularized peakon evolution and the eps -> 0 comparison with sticky peakons.

The regularized system moves every peakon with the mollified field, which is
smooth, so peakons never collide and no merge is ever performed. Study runs
for different eps are independent and are fanned out over a process pool;
each worker returns its samples and the parent assembles the trajectories.
"""

import math
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

import mollifier
from debugcolor import co, say
from errors import IntegratorError
from integrate import evolve_free
from sticky import Trajectory, classify_triple_collision, evolve_sticky

GAP_OFFSET = 0.5


@dataclass(frozen=True)
class ConvergenceReport:
    eps_values: tuple
    sup_distances: tuple
    scaled_gaps: tuple  # per eps, one value per pair merged at the first event
    min_gaps: tuple  # per eps, smallest gap over all samples
    gap_time: float  # time at which scaled gaps are sampled; nan without a merge
    event_times: tuple  # merge times of the sticky reference run
    collision_case: str  # three-peakon pattern of the first merge, "" otherwise
    separation_time: float


def separation_time(state):
    """2 min(gap) / M0^2: before it no gap, regularized or not, can have closed."""
    if state.n < 2 or state.m0 == 0.0:
        return math.inf
    return 2.0 * float(np.min(state.gaps)) / state.m0**2


def safe_eps(state, t):
    """Largest eps keeping every gap above 2 eps on [0, t]; 0 if none does."""
    if state.n < 2:
        return math.inf
    return max(0.0, 0.5 * (float(np.min(state.gaps)) - 0.5 * state.m0**2 * t))


def regularized_dt(state, spec, dt):
    """Caps dt at eps / (2 M0^2), where the stiffest gap relaxes at most at rate 1 / (4 dt)."""
    if state.m0 == 0.0:
        return dt
    return min(dt, spec.eps / (2.0 * state.m0**2))


def regularized_samples(initial, spec, config):
    """Sampled states of a regularized run; module level so a worker process can run it."""
    dt = regularized_dt(initial, spec, config.dt)
    # keep the sample spacing of the unscaled run
    every = max(1, int(round(config.dt * config.sample_every / dt)))
    run_config = config.with_changes(
        dt=dt, bisect_tol=min(config.bisect_tol, 0.5 * dt), sample_every=every
    )
    return evolve_free(mollifier.regularized_flow(spec), initial, run_config).samples


def regularized_trajectory(initial, spec, samples):
    traj = Trajectory(
        initial,
        "mch_regularized",
        velocity=lambda s: mollifier.regularized_rhs(s, spec),
    )
    traj.add_samples(samples)
    return traj


def evolve_regularized(initial, spec, config):
    return regularized_trajectory(initial, spec, regularized_samples(initial, spec, config))


class ConvergenceStudy:
    def debug_print(self, statement):
        if self.debug:
            say(co("[DISPERSIVE]" + str(statement), "orange", "bold"))

    def error_print(self, statement):
        say(co("[DISPERSIVE]" + str(statement), "red", "bold"))

    def __init__(self, config, family=mollifier.COSINE, gap_offset=GAP_OFFSET, workers=None):
        self.config = config
        self.family = family
        self.gap_offset = gap_offset
        self.workers = workers
        self.debug = config.debug

    def _regularized(self, initial, eps_list):
        specs = [mollifier.MollifierSpec(self.family, eps) for eps in eps_list]
        workers = min(self.workers or os.cpu_count() or 1, len(specs))
        try:
            if workers == 1:
                samples = [regularized_samples(initial, s, self.config) for s in specs]
            else:
                with ProcessPoolExecutor(max_workers=workers) as pool:
                    futures = [
                        pool.submit(regularized_samples, initial, s, self.config) for s in specs
                    ]
                    samples = [f.result() for f in futures]
        except IntegratorError as e:
            self.error_print("".join(traceback.format_exception(e)))
            raise
        runs = []
        for spec, states in zip(specs, samples):
            self.debug_print(f"eps={spec.eps!r}: {len(states)} samples")
            runs.append(regularized_trajectory(initial, spec, states))
        return runs

    def run(self, initial, eps_list):
        eps_list = [float(e) for e in eps_list]
        if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
            raise ValueError(f"eps values must be strictly decreasing, got {eps_list}")
        reference = evolve_sticky(initial, self.config)
        runs = self._regularized(initial, eps_list)

        first = reference.events[0] if reference.events else None
        gap_time = math.nan
        merged_pairs = []
        if first is not None:
            gap_time = min(first.t + self.gap_offset, reference.t_final)
            for group in first.partition.groups:
                merged_pairs.extend((k, k + 1) for k in group[:-1])

        distances, scaled, min_gaps = [], [], []
        for eps, traj in zip(eps_list, runs):
            distances.append(sup_distance(traj, reference))
            min_gaps.append(min_gap(traj))
            if first is None:
                scaled.append(())
                continue
            s = int(np.argmin(np.abs(traj.times - gap_time)))
            gaps = traj.samples[s].gaps
            scaled.append(tuple(float(gaps[k]) / eps for k, _ in merged_pairs))

        case = ""
        if first is not None and initial.n == 3:
            case = classify_triple_collision(first)
        return ConvergenceReport(
            tuple(eps_list),
            tuple(distances),
            tuple(scaled),
            tuple(min_gaps),
            gap_time,
            tuple(e.t for e in reference.events),
            case,
            separation_time(initial),
        )


def sup_distance(regularized, reference):
    """max over regularized samples of max_i |x_i^eps(t) - x_i(t)|, lineage-resolved."""
    worst = 0.0
    t_stop = min(regularized.t_final, reference.t_final)
    for state in regularized.samples:
        if state.t > t_stop:
            break
        gap = np.max(np.abs(state.positions - reference.positions_at(state.t)))
        worst = max(worst, float(gap))
    return worst


def min_gap(traj):
    if traj.initial.n < 2:
        return math.inf
    return float(min(np.min(s.gaps) for s in traj.samples))


def convergence_study(initial, eps_list, config, family=mollifier.COSINE, workers=None):
    return ConvergenceStudy(config, family, workers=workers).run(initial, eps_list)
