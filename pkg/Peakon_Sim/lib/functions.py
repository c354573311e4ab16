"""
This is the class that ties the simulator together. It takes a parsed
scenario or study, runs the matching solver and writes the requested files.
Every entry point of the command line goes through here.
"""

import os
import traceback

import numpy as np

import scenario as sc
import writers
from debugcolor import co, say
from dispersive import ConvergenceStudy, evolve_regularized, min_gap
from errors import PeakonError
from integrate import evolve_ch
from sticky import evolve_sticky, evolve_until_collision, max_sample_speed
from verify import energy_audit


class Functions:

    def debug_print(self, statement):
        if self.debug:
            say(co("[FUNCTIONS]" + str(statement), "green", "bold"))

    def error_print(self, statement):
        say(co("[FUNCTIONS]" + str(statement), "red", "bold"))

    def __init__(self, debug=False):
        self.debug = debug
        self.debug_print("Initializing Functionalities")
        self.solvers = {
            sc.CONSERVATIVE: self.sticky_run,
            sc.NONCONSERVATIVE: self.nonconservative_run,
            sc.REGULARIZED: self.regularized_run,
            sc.CH: self.ch_run,
        }

    """
    Simulation Functions
    """

    def sticky_run(self, scenario):
        return evolve_sticky(scenario.initial, scenario.sim)

    def nonconservative_run(self, scenario):
        traj = evolve_until_collision(scenario.initial, scenario.sim)
        if traj.stop_event is not None:
            self.debug_print(
                f"non-conservative run stopped by a collision at t={traj.stop_event.t_event!r}"
            )
        return traj

    def regularized_run(self, scenario):
        return evolve_regularized(scenario.initial, scenario.spec, scenario.sim)

    def ch_run(self, scenario):
        init = scenario.initial
        return evolve_ch(init.positions, init.momenta, scenario.sim)

    """
    File Functions
    """

    def run_scenario(self, scenario, out_dir):
        """Runs one scenario and writes its outputs. Returns the list of written files."""
        self.debug_print(f"running {scenario.name} ({scenario.system}, N={scenario.initial.n})")
        try:
            result = self.solvers[scenario.system](scenario)
        except PeakonError as e:
            self.error_print(
                f"{scenario.name} failed: " + "".join(traceback.format_exception(e))
            )
            raise
        os.makedirs(out_dir, exist_ok=True)
        base = os.path.join(out_dir, scenario.name)
        if scenario.system == sc.CH:
            return self._write_ch(scenario, result, base)
        written = []
        if "trajectory_csv" in scenario.outputs:
            written.append(writers.write_trajectory_csv(base + "_trajectory.csv", result))
        if "energy_csv" in scenario.outputs:
            written.append(writers.write_energy_csv(base + "_energy.csv", result))
        if "events_json" in scenario.outputs:
            written.append(writers.write_events_json(base + "_events.json", result))
        if "report_json" in scenario.outputs:
            written.append(writers.save_json(base + "_report.json", self.summary(scenario, result)))
        self.debug_print(f"wrote {len(written)} file(s) under {out_dir}")
        return written

    def summary(self, scenario, traj):
        audit = energy_audit(traj)
        init = scenario.initial
        return {
            "name": scenario.name,
            "system": scenario.system,
            "positions_note": scenario.note,
            "n": init.n,
            "m0": init.m0,
            "speed_bound": 0.5 * init.m0**2,
            "max_sample_speed": max_sample_speed(traj),
            "t_end": traj.t_final,
            "samples": len(traj.samples),
            "merge_events": len(traj.events),
            "event_times": [e.t for e in traj.events],
            "stopped_at": traj.stop_event.t_event if traj.stop_event else None,
            "energy_initial": audit.initial,
            "energy_max_relative_drift": audit.max_drift,
            "energy_jumps": [jump for _, jump in audit.jumps],
            "min_gap": min_gap(traj),
            "mollifier": (
                {"family": scenario.spec.family, "eps": scenario.spec.eps}
                if scenario.spec
                else None
            ),
        }

    def _write_ch(self, scenario, run, base):
        written = [writers.write_ch_csv(base + "_trajectory.csv", run)]
        if "report_json" in scenario.outputs:
            h = run.hamiltonian
            drift = float(np.max(np.abs(h - h[0]))) / max(abs(h[0]), 1.0)
            report = {
                "name": scenario.name,
                "system": scenario.system,
                "n": scenario.initial.n,
                "t_end": float(run.times[-1]),
                "hamiltonian_initial": float(h[0]),
                "hamiltonian_max_relative_drift": drift,
                "total_momentum_drift": float(
                    np.max(np.abs(run.momenta.sum(axis=1) - run.momenta[0].sum()))
                ),
            }
            written.append(writers.save_json(base + "_report.json", report))
        return written

    def run_study(self, study, out_dir, out_format="csv"):
        self.debug_print(f"study {study.name}: eps {list(study.eps)}")
        runner = ConvergenceStudy(study.sim, study.family, study.gap_offset, study.workers)
        try:
            report = runner.run(study.initial, study.eps)
        except PeakonError as e:
            self.error_print(f"{study.name} failed: " + "".join(traceback.format_exception(e)))
            raise
        path = writers.write_study(out_dir, study.name, report, out_format)
        for eps, dist in zip(report.eps_values, report.sup_distances):
            self.debug_print(f"eps={eps:<8g} sup distance {dist:.3e}")
        return report, path
