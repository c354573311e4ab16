"""
Scenario and study files.

Both are TOML documents carrying `schema = 1`. Unknown keys are rejected so a
misspelt parameter fails loudly instead of silently falling back to a default.
Example:

    schema = 1
    name = "fig1a"
    system = "mch_conservative"
    momenta = [15.0, 2.0, 3.0]
    positions = [-2.0, -1.0, 0.0]
    positions_note = "implementation default"
    outputs = ["trajectory_csv", "energy_csv", "events_json", "report_json"]

    [sim]
    dt = 1e-3
    t_end = 2.0
"""

import math
from dataclasses import dataclass

import tomli

import mollifier
from errors import OrderingError, ScenarioError
from integrate import SimConfig, rounding_floor
from state import PeakonState

SCHEMA_VERSION = 1
CONSERVATIVE = "mch_conservative"
NONCONSERVATIVE = "mch_nonconservative"
REGULARIZED = "mch_regularized"
CH = "ch"
SYSTEMS = (CONSERVATIVE, NONCONSERVATIVE, REGULARIZED, CH)
OUTPUTS = ("trajectory_csv", "energy_csv", "events_json", "report_json")

SIM_DEFAULTS = {
    "dt": 1e-3,
    "t_end": 2.0,
    "merge_gap_tol": 1e-9,
    "bisect_tol": 1e-12,
    "sample_every": 1,
}

_COMMON_KEYS = {"schema", "name", "description", "momenta", "positions", "positions_note", "sim"}
_SCENARIO_KEYS = _COMMON_KEYS | {"system", "mollifier", "outputs"}
_STUDY_KEYS = _COMMON_KEYS | {"eps", "family", "gap_offset", "workers"}
_MOLLIFIER_KEYS = {"family", "eps"}


@dataclass(frozen=True)
class Scenario:
    name: str
    system: str
    initial: PeakonState
    sim: SimConfig
    spec: mollifier.MollifierSpec = None
    outputs: tuple = OUTPUTS
    note: str = ""


@dataclass(frozen=True)
class Study:
    name: str
    initial: PeakonState
    eps: tuple
    sim: SimConfig
    family: str = mollifier.COSINE
    gap_offset: float = 0.5
    workers: int = None
    note: str = ""


def read_toml(path):
    try:
        with open(path, "rb") as f:
            return tomli.load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e}") from e
    except tomli.TOMLDecodeError as e:
        raise ScenarioError(f"{path} is not valid TOML: {e}") from e


def _reject_unknown(table, allowed, where):
    unknown = sorted(set(table) - allowed)
    if unknown:
        raise ScenarioError(
            f"unknown key(s) {unknown} in {where}; allowed: {sorted(allowed)}"
        )


def _numbers(doc, key, path):
    values = doc.get(key)
    if not isinstance(values, list) or not values:
        raise ScenarioError(f"{path}: '{key}' must be a non-empty list of numbers")
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ScenarioError(f"{path}: '{key}' holds a non-number {v!r}")
        if not math.isfinite(v):
            raise ScenarioError(f"{path}: '{key}' holds a non-finite value {v!r}")
    return [float(v) for v in values]


def _check_header(doc, allowed, path):
    _reject_unknown(doc, allowed, path)
    if doc.get("schema") != SCHEMA_VERSION:
        raise ScenarioError(
            f"{path}: schema must be {SCHEMA_VERSION}, got {doc.get('schema')!r}"
        )
    if not isinstance(doc.get("name"), str) or not doc["name"]:
        raise ScenarioError(f"{path}: 'name' must be a non-empty string")


def _initial(doc, path):
    momenta = _numbers(doc, "momenta", path)
    positions = _numbers(doc, "positions", path)
    if len(momenta) != len(positions):
        raise ScenarioError(
            f"{path}: {len(positions)} positions but {len(momenta)} momenta"
        )
    try:
        return PeakonState.from_positions(0.0, positions, momenta)
    except OrderingError:
        raise
    except ValueError as e:
        raise ScenarioError(f"{path}: {e}") from e


def _check_resolution(initial, sim, path):
    floor, scale = rounding_floor(initial)
    if sim.merge_gap_tol < floor:
        raise ScenarioError(
            f"{path} [sim]: merge_gap_tol={sim.merge_gap_tol!r} is below the rounding "
            f"floor {floor:.3g} for positions of size {scale:.3g}; raise it or recentre"
        )


def _sim(doc, path, overrides, debug):
    table = doc.get("sim", {})
    if not isinstance(table, dict):
        raise ScenarioError(f"{path}: [sim] must be a table")
    _reject_unknown(table, set(SIM_DEFAULTS), f"{path} [sim]")
    values = dict(SIM_DEFAULTS)
    values.update(table)
    for key in ("dt", "t_end"):
        if overrides.get(key) is not None:
            values[key] = overrides[key]
    try:
        return SimConfig(debug=debug, **values)
    except (TypeError, ValueError) as e:
        raise ScenarioError(f"{path} [sim]: {e}") from e


def load_scenario(path, overrides=None, debug=False):
    """Parses a scenario file; overrides may carry dt, t_end and eps (a list)."""
    overrides = overrides or {}
    doc = read_toml(path)
    _check_header(doc, _SCENARIO_KEYS, path)
    system = doc.get("system")
    if system not in SYSTEMS:
        raise ScenarioError(f"{path}: system must be one of {SYSTEMS}, got {system!r}")
    initial = _initial(doc, path)
    sim = _sim(doc, path, overrides, debug)
    _check_resolution(initial, sim, path)

    if overrides.get("eps") and system != REGULARIZED:
        raise ScenarioError(
            f"{path}: --eps only applies to {REGULARIZED} scenarios, this one is {system}"
        )
    spec = None
    if "mollifier" in doc:
        if system != REGULARIZED:
            raise ScenarioError(f"{path}: [mollifier] is only valid for {REGULARIZED}")
        table = doc["mollifier"]
        if not isinstance(table, dict):
            raise ScenarioError(f"{path}: [mollifier] must be a table")
        _reject_unknown(table, _MOLLIFIER_KEYS, f"{path} [mollifier]")
        eps = table.get("eps")
        if overrides.get("eps"):
            eps = overrides["eps"][0]
        try:
            spec = mollifier.MollifierSpec(table.get("family", mollifier.COSINE), eps)
        except (TypeError, ValueError) as e:
            raise ScenarioError(f"{path} [mollifier]: {e}") from e
    elif system == REGULARIZED:
        raise ScenarioError(f"{path}: {REGULARIZED} needs a [mollifier] table")

    outputs = doc.get("outputs", list(OUTPUTS))
    if not isinstance(outputs, list) or any(o not in OUTPUTS for o in outputs):
        raise ScenarioError(f"{path}: outputs must be a list drawn from {OUTPUTS}")
    return Scenario(
        doc["name"], system, initial, sim, spec, tuple(outputs), doc.get("positions_note", "")
    )


def load_study(path, overrides=None, debug=False):
    overrides = overrides or {}
    doc = read_toml(path)
    _check_header(doc, _STUDY_KEYS, path)
    initial = _initial(doc, path)
    sim = _sim(doc, path, overrides, debug)
    _check_resolution(initial, sim, path)
    eps = overrides.get("eps") or doc.get("eps")
    if not isinstance(eps, (list, tuple)) or not eps:
        raise ScenarioError(f"{path}: 'eps' must be a non-empty list")
    eps = [float(e) for e in eps]
    if any(e <= 0.0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ScenarioError(
            f"{path}: eps values must be positive and strictly decreasing, got {eps}"
        )
    family = doc.get("family", mollifier.COSINE)
    if family not in mollifier.FAMILIES:
        raise ScenarioError(f"{path}: unknown mollifier family {family!r}")
    workers = doc.get("workers")
    if workers is not None and (not isinstance(workers, int) or workers < 1):
        raise ScenarioError(f"{path}: workers must be a positive integer")
    return Study(
        doc["name"],
        initial,
        tuple(eps),
        sim,
        family,
        float(doc.get("gap_offset", 0.5)),
        workers,
        doc.get("positions_note", ""),
    )
