"""
Output files. CSV floats are written with 17 significant digits so every
value round-trips; JSON floats use Python's round-trip repr. Files are
written in a fixed order with no timestamps, so repeated runs are
byte-identical.
"""

import csv
import json
import os

import numpy as np

import kernel


def fmt(value):
    return format(float(value), ".17g")


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if np.isfinite(value) else None
    return value


def save_rows_csv(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def save_json(path, payload):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as f:
        json.dump(_jsonable(payload), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def write_trajectory_csv(path, traj):
    """t, x_1..x_N (original indexing, merged peakons repeat their value), H."""
    n = traj.initial.n
    header = ["t"] + [f"x_{i + 1}" for i in range(n)] + ["H"]
    rows = []
    for s, state in enumerate(traj.samples):
        x = traj.original_positions(s)
        rows.append([float(state.t)] + [float(v) for v in x] + [kernel.energy(state)])
    return save_rows_csv(path, header, rows)


def write_energy_csv(path, traj):
    h0 = kernel.energy(traj.initial)
    scale = abs(h0) if h0 != 0.0 else 1.0
    rows = []
    for state in traj.samples:
        h = kernel.energy(state)
        rows.append([float(state.t), h, abs(h - h0) / scale, float(state.n)])
    return save_rows_csv(path, ["t", "H", "relative_drift", "peakons"], rows)


def events_payload(traj):
    events = []
    for e, event in enumerate(traj.events):
        lineage = traj.lineage[e]
        original = [
            [int(i) + 1 for i in np.flatnonzero(np.isin(lineage, list(group)))]
            for group in event.partition.groups
        ]
        events.append(
            {
                "t": event.t,
                "groups": [[i + 1 for i in group] for group in event.partition.groups],
                "original_groups": original,
                "momenta_before": event.pre_state.momenta,
                "momenta_after": event.post_state.momenta,
                "closing_speeds": list(event.closing_speeds),
                "energy_jump": event.energy_jump,
            }
        )
    if traj.stop_event is not None:
        stop = traj.stop_event
        events.append(
            {
                "t": stop.t_event,
                "kind": stop.kind,
                "pairs": [[a + 1, b + 1] for a, b in stop.indices],
                "closing_speeds": list(stop.closing_speeds),
                "stopped": True,
            }
        )
    return events


def write_events_json(path, traj):
    return save_json(path, events_payload(traj))


def write_ch_csv(path, run):
    n = run.positions.shape[1]
    header = (
        ["t"] + [f"x_{i + 1}" for i in range(n)] + [f"p_{i + 1}" for i in range(n)] + ["H0"]
    )
    rows = [
        [float(t)] + [float(v) for v in x] + [float(v) for v in p] + [float(h)]
        for t, x, p, h in zip(run.times, run.positions, run.momenta, run.hamiltonian)
    ]
    return save_rows_csv(path, header, rows)


def write_study(out_dir, name, report, out_format="csv"):
    if out_format == "json":
        payload = {
            "eps": report.eps_values,
            "sup_distance": report.sup_distances,
            "scaled_gaps": report.scaled_gaps,
            "min_gap": report.min_gaps,
            "gap_time": report.gap_time,
            "event_times": report.event_times,
            "collision_case": report.collision_case,
            "separation_time": report.separation_time,
        }
        return save_json(os.path.join(out_dir, f"{name}_study.json"), payload)
    width = max([len(g) for g in report.scaled_gaps] + [0])
    header = ["eps", "sup_distance", "min_gap"] + [f"scaled_gap_{k + 1}" for k in range(width)]
    rows = []
    for eps, dist, gap, scaled in zip(
        report.eps_values, report.sup_distances, report.min_gaps, report.scaled_gaps
    ):
        rows.append([float(eps), float(dist), float(gap)] + [float(v) for v in scaled])
    return save_rows_csv(os.path.join(out_dir, f"{name}_study.csv"), header, rows)
