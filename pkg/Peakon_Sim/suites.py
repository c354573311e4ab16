"""
Verification suites behind `check`. Each handler returns a dict with a
"passed" flag and the numbers it judged; run_suites dispatches through the
command table, collects the results and writes check_report.json.
"""

import os
import time
import traceback

import numpy as np

import dynamics
import mollifier
import scenario as sc
import writers
from debugcolor import co, say
from dispersive import ConvergenceStudy, evolve_regularized, min_gap
from errors import CheckFailure, PeakonError
from integrate import SimConfig
from state import PeakonState
from sticky import evolve_sticky, evolve_until_collision, max_sample_speed, speed_consistency
from verify import (
    QuadConfig,
    TestFunction,
    ch_splitting_demo,
    energy_audit,
    splitting_demo,
    weak_residual,
)

SEED = 42
SCENARIO_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "scenarios")
SPEED_SLACK = 1e-6

debug = False


def debug_print(statement):
    if debug:
        say(co("[SUITES]" + str(statement), "white", "bold"))


def error_print(statement):
    say(co("[SUITES]" + str(statement), "red", "bold"))


def stock(name, **changes):
    scenario = sc.load_scenario(os.path.join(SCENARIO_DIR, name + ".toml"), debug=debug)
    if changes:
        return scenario.initial, scenario.sim.with_changes(**changes)
    return scenario.initial, scenario.sim


def random_state(rng, n_range=(2, 10), bound=5.0, spread=5.0):
    while True:
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        x = np.sort(rng.uniform(-spread, spread, n))
        if np.all(np.diff(x) > 0.0):
            return PeakonState.from_positions(0.0, x, rng.uniform(-bound, bound, n))


def speed_ok(traj):
    return max_sample_speed(traj) <= 0.5 * traj.initial.m0**2 + SPEED_SLACK


############### identity suite ###############
def identities(seed):
    rng = np.random.default_rng(seed)
    worst = {"alternating": 0.0, "energy": 0.0, "velocity": 0.0, "fast_constants": 0.0}
    for _ in range(1000):
        state = random_state(rng)
        m2 = max(state.m0**2, 1e-300)
        worst["alternating"] = max(
            worst["alternating"], abs(dynamics.alternating_identity_residual(state)) / m2
        )
        worst["energy"] = max(
            worst["energy"], abs(dynamics.energy_identity_residual(state)) / m2**2
        )
        speeds = dynamics.speed_table(dynamics.pair_couplings(state))
        worst["velocity"] = max(
            worst["velocity"],
            float(np.max(np.abs(speeds - dynamics.mch_conservative_rhs(state)))) / m2,
        )
        robust = dynamics.interval_constants(state).values
        fast = dynamics.interval_constants_fast(state).values
        worst["fast_constants"] = max(
            worst["fast_constants"], float(np.max(np.abs(robust - fast))) / m2
        )
    return {"passed": all(v <= 1e-12 for v in worst.values()), "scaled_residuals": worst}


############### energy suite ###############
def energy(seed):
    out = {"passed": True}
    for name in ("fig1a", "fig1b"):
        initial, config = stock(name, dt=1e-3, t_end=2.0)
        traj = evolve_sticky(initial, config)
        audit = energy_audit(traj)
        jump = max([j for _, j in audit.jumps] + [0.0])
        ok = (
            audit.max_drift <= 1e-6
            and jump <= 1e-8
            and len(traj.events) >= 1
            and speed_ok(traj)
        )
        out[name] = {
            "relative_drift": audit.max_drift,
            "max_event_jump": jump,
            "event_times": [e.t for e in traj.events],
            "max_sample_speed": max_sample_speed(traj),
        }
        out["passed"] = out["passed"] and ok
    return out


############### stationarity suite ###############
def stationarity(seed):
    config = SimConfig(dt=1e-2, t_end=10.0)
    still = PeakonState.from_positions(0.0, [0.0], [2.0])
    drift = float(abs(evolve_sticky(still, config).samples[-1].anchor))
    p = 1.5
    moving = PeakonState.from_positions(0.0, [0.0], [2.0 * p])
    end = evolve_until_collision(moving, config).samples[-1]
    travel_error = abs(end.anchor - 2.0 * p**2 * end.t / 3.0)
    return {
        "passed": drift <= 1e-12 and travel_error <= 1e-8,
        "conservative_displacement": drift,
        "nonconservative_travel_error": travel_error,
    }


############### weak residual suite ###############
def residual(seed):
    initial, config = stock("fig1a", t_end=2.0)
    traj = evolve_sticky(initial, config)
    quad = QuadConfig(debug=debug)
    values = []
    for center, half_width in ((0.0, 6.0), (4.0, 8.0), (8.0, 10.0)):
        report = weak_residual(traj, TestFunction(1.5, center, half_width), quad)
        values.append(
            {
                "center": center,
                "half_width": half_width,
                "residual": report.value,
                "panel_change": report.error_estimate,
            }
        )
    return {
        "passed": all(v["residual"] <= 1e-4 for v in values),
        "merge_times": [e.t for e in traj.events],
        "functions": values,
    }


############### splitting suites ###############
def splitting(seed):
    report = splitting_demo()
    start, end = report.rows[0], report.rows[-1]
    energies_ok = all(
        abs(h_a - 8.0) <= 1e-6 and abs(h_b - 8.0) <= 1e-6 for _, _, h_a, h_b in report.rows
    )
    return {
        "passed": start[1] <= 1e-10 and end[1] >= 1e-3 and energies_ok,
        "rows": [list(r) for r in report.rows],
        "initial_velocities": list(report.initial_velocities),
    }


def ch_splitting(seed):
    rng = np.random.default_rng(seed)
    cases = [(4.0, (5.0, -1.0), 0.0), (4.0, (4.0, 0.0), 0.0)]
    for _ in range(20):
        c = float(rng.uniform(1.0, 5.0))
        first = c * float(rng.uniform(0.1, 0.9))
        cases.append((c, (first, c - first), float(rng.uniform(-1.0, 1.0))))
    runs = []
    for c, split, x0 in cases:
        report = ch_splitting_demo(c, split, x0)
        runs.append(
            {
                "passed": report.passed,
                "separation": report.separation,
                "position_error": report.position_error,
                "hamiltonian_drift": report.hamiltonian_drift,
            }
        )
    return {"passed": all(r["passed"] for r in runs), "runs": runs}


############### mollifier suite ###############
def mollifier_suite(seed):
    rng = np.random.default_rng(seed)
    midpoint = 0.0
    for family in mollifier.FAMILIES:
        for eps in (0.01, 0.1, 1.0):
            spec = mollifier.MollifierSpec(family, eps)
            for left, right in ((0.0, 1.0), (-1.0, 2.5), (3.0, -0.5)):
                midpoint = max(midpoint, mollifier.midpoint_property_residual(spec, left, right))
    oracle = 0.0
    for k in range(500):
        state = random_state(rng, n_range=(1, 5), bound=3.0, spread=3.0)
        spec = mollifier.MollifierSpec(
            mollifier.FAMILIES[k % len(mollifier.FAMILIES)], float(rng.uniform(0.05, 1.0))
        )
        x = float(rng.uniform(-4.0, 4.0))
        exact = mollifier.regularized_field(state, spec, x)
        by_quadrature = mollifier.regularized_field_by_quadrature(state, spec, x)
        oracle = max(oracle, abs(exact - by_quadrature))
    return {
        "passed": midpoint <= 1e-15 and oracle <= 1e-10,
        "midpoint_residual": midpoint,
        "oracle_error": oracle,
    }


############### speed suite ###############
def speed(seed):
    initial, config = stock("fig1a")
    runs = {
        "sticky": evolve_sticky(initial, config),
        "nonconservative": evolve_until_collision(initial, config),
        "regularized": evolve_regularized(
            initial, mollifier.MollifierSpec(eps=0.1), config.with_changes(sample_every=10)
        ),
    }
    out = {"passed": True, "bound": 0.5 * initial.m0**2}
    for name, traj in runs.items():
        out[name] = max_sample_speed(traj)
        out["passed"] = out["passed"] and speed_ok(traj)
    out["sticky_formula_error"] = speed_consistency(runs["sticky"], sample_count=200)
    out["passed"] = out["passed"] and out["sticky_formula_error"] <= 1e-3 * initial.m0**2
    return out


############### dispersive suite ###############
def dispersive(seed):
    out = {"passed": True}
    for name, eps in (("fig1a", (0.2, 0.1, 0.05, 0.025)), ("fig1b", (0.2, 0.1, 0.05))):
        initial, config = stock(name, t_end=2.0, sample_every=10)
        report = ConvergenceStudy(config).run(initial, eps)
        dist = report.sup_distances
        ok = all(g > 0.0 for g in report.min_gaps)
        ok = ok and all(b <= a for a, b in zip(dist, dist[1:]))
        if name == "fig1a" and report.scaled_gaps and report.scaled_gaps[0]:
            lead = [g[0] for g in report.scaled_gaps]
            ok = ok and all(b < a for a, b in zip(lead, lead[1:]))
        out[name] = {
            "eps": list(report.eps_values),
            "sup_distance": list(dist),
            "min_gap": list(report.min_gaps),
            "scaled_gaps": [list(g) for g in report.scaled_gaps],
            "collision_case": report.collision_case,
        }
        out["passed"] = out["passed"] and ok

    initial, config = stock("two_peakon")
    eps = float(np.min(initial.gaps)) / 4.0
    traj = evolve_regularized(initial, mollifier.MollifierSpec(eps=eps), config)
    reference = evolve_sticky(initial, config)
    exact = float(
        max(np.max(np.abs(s.positions - reference.positions_at(s.t))) for s in traj.samples)
    )
    out["pre_collision"] = {"eps": eps, "sup_distance": exact, "min_gap": min_gap(traj)}
    out["passed"] = out["passed"] and exact <= 1e-8
    return out


commands = {
    "identities": identities,
    "energy": energy,
    "stationarity": stationarity,
    "residual": residual,
    "splitting": splitting,
    "ch-splitting": ch_splitting,
    "mollifier": mollifier_suite,
    "speed": speed,
    "dispersive": dispersive,
}


def run_suites(names, seed=SEED, out_dir="out", verbose=False):
    global debug
    debug = verbose
    results = {}
    for name in names:
        debug_print(f"running {name} (seed {seed})")
        start = time.perf_counter()
        try:
            result = commands[name](seed)
        except (PeakonError, ValueError) as e:
            error_print(f"{name} raised: " + "".join(traceback.format_exception(e)))
            result = {"passed": False, "error": f"{type(e).__name__}: {e}"}
        elapsed = time.perf_counter() - start
        debug_print(f"{name}: {'pass' if result['passed'] else 'FAIL'} in {elapsed:.2f}s")
        results[name] = result
    payload = {
        "seed": seed,
        "passed": all(r["passed"] for r in results.values()),
        "suites": results,
    }
    path = writers.save_json(os.path.join(out_dir, "check_report.json"), payload)
    return results, path


def require_pass(results):
    failed = [name for name, r in results.items() if not r["passed"]]
    if failed:
        raise CheckFailure(f"suite(s) failed: {', '.join(failed)}")
