import pytest

import mollifier
import scenario as sc
from errors import OrderingError, ScenarioError


def write(tmp_path, text, name="case.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


BASE = """
schema = 1
name = "case"
system = "mch_conservative"
momenta = [1.0, 2.0]
positions = [0.0, 1.0]
"""


def test_stock_fig1a(scenario_path):
    scenario = sc.load_scenario(scenario_path("fig1a"))
    assert scenario.name == "fig1a"
    assert scenario.system == sc.CONSERVATIVE
    assert scenario.initial.momenta.tolist() == [15.0, 2.0, 3.0]
    assert scenario.sim.dt == 1e-3 and scenario.sim.t_end == 2.0
    assert "implementation default" in scenario.note
    assert scenario.spec is None


@pytest.mark.parametrize(
    "name",
    [
        "fig1a",
        "fig1b",
        "fig1a_nonconservative",
        "fig1a_regularized",
        "two_peakon",
        "single",
        "ch_pair",
    ],
)
def test_every_stock_scenario_loads(scenario_path, name):
    scenario = sc.load_scenario(scenario_path(name))
    assert scenario.system in sc.SYSTEMS
    assert (scenario.spec is not None) == (scenario.system == sc.REGULARIZED)


@pytest.mark.parametrize("name", ["fig2", "fig3", "single_study"])
def test_every_stock_study_loads(scenario_path, name):
    study = sc.load_study(scenario_path(name))
    assert list(study.eps) == sorted(study.eps, reverse=True)


def test_fig3_uses_the_ordered_third_position(scenario_path):
    study = sc.load_study(scenario_path("fig3"))
    assert study.initial.positions.tolist() == [-2.0, -1.0, 2.0, 5.0]


def test_defaults_fill_the_sim_table(tmp_path):
    scenario = sc.load_scenario(write(tmp_path, BASE))
    assert scenario.sim.merge_gap_tol == sc.SIM_DEFAULTS["merge_gap_tol"]
    assert scenario.outputs == sc.OUTPUTS


def test_overrides_win(tmp_path):
    path = write(tmp_path, BASE + '\n[sim]\ndt = 0.01\nt_end = 3.0\n')
    scenario = sc.load_scenario(path, {"dt": 0.002, "t_end": None}, debug=True)
    assert scenario.sim.dt == 0.002
    assert scenario.sim.t_end == 3.0
    assert scenario.sim.debug


@pytest.mark.parametrize(
    "extra",
    [
        "colour = 3\n",
        "[sim]\nstep = 0.1\n",
        "[sim]\ndt = -1.0\n",
        "outputs = [\"movie\"]\n",
        "[mollifier]\neps = 0.1\n",
    ],
)
def test_schema_errors(tmp_path, extra):
    with pytest.raises(ScenarioError):
        sc.load_scenario(write(tmp_path, BASE + extra))


def test_header_errors(tmp_path):
    with pytest.raises(ScenarioError, match="schema"):
        sc.load_scenario(write(tmp_path, BASE.replace("schema = 1", "schema = 2")))
    with pytest.raises(ScenarioError, match="system"):
        sc.load_scenario(write(tmp_path, BASE.replace("mch_conservative", "kdv")))
    with pytest.raises(ScenarioError, match="non-number"):
        sc.load_scenario(write(tmp_path, BASE.replace("[1.0, 2.0]", '[1.0, "two"]')))
    with pytest.raises(ScenarioError, match="momenta"):
        sc.load_scenario(write(tmp_path, BASE.replace("[1.0, 2.0]", "[1.0]")))
    with pytest.raises(ScenarioError, match="TOML"):
        sc.load_scenario(write(tmp_path, "schema = = 1"))
    with pytest.raises(ScenarioError, match="cannot read"):
        sc.load_scenario(str(tmp_path / "missing.toml"))


def test_unordered_positions_are_an_ordering_error(tmp_path):
    text = BASE.replace("[1.0, 2.0]", "[1.0, 2.0, 3.0]").replace("[0.0, 1.0]", "[0.0, 0.0, 1.0]")
    with pytest.raises(OrderingError):
        sc.load_scenario(write(tmp_path, text))


def test_regularized_needs_a_mollifier(tmp_path):
    text = BASE.replace("mch_conservative", "mch_regularized")
    with pytest.raises(ScenarioError, match="mollifier"):
        sc.load_scenario(write(tmp_path, text))
    spec = sc.load_scenario(
        write(tmp_path, text + '\n[mollifier]\nfamily = "quadratic_bump"\neps = 0.1\n'),
        {"eps": [0.05, 0.01]},
    ).spec
    assert spec == mollifier.MollifierSpec(mollifier.QUADRATIC, 0.05)


def test_study_validation(tmp_path):
    study = """
schema = 1
name = "s"
momenta = [1.0, 2.0]
positions = [0.0, 1.0]
eps = [0.2, 0.1]
"""
    assert sc.load_study(write(tmp_path, study), {"eps": [0.3, 0.05]}).eps == (0.3, 0.05)
    with pytest.raises(ScenarioError, match="decreasing"):
        sc.load_study(write(tmp_path, study.replace("[0.2, 0.1]", "[0.1, 0.2]")))
    with pytest.raises(ScenarioError, match="family"):
        sc.load_study(write(tmp_path, study + 'family = "box"\n'))
    with pytest.raises(ScenarioError, match="workers"):
        sc.load_study(write(tmp_path, study + "workers = 0\n"))
    with pytest.raises(ScenarioError):
        sc.load_study(write(tmp_path, study + 'system = "ch"\n'))


@pytest.mark.parametrize(
    "old, new",
    [("[1.0, 2.0]", "[1.0, inf]"), ("[0.0, 1.0]", "[0.0, nan]")],
)
def test_non_finite_values_are_schema_errors(tmp_path, old, new):
    with pytest.raises(ScenarioError, match="non-finite"):
        sc.load_scenario(write(tmp_path, BASE.replace(old, new)))


def test_tolerance_below_the_rounding_floor(tmp_path):
    far = BASE.replace("[0.0, 1.0]", "[1e9, 1.000000001e9]")
    with pytest.raises(ScenarioError, match="rounding floor"):
        sc.load_scenario(write(tmp_path, far))
    scenario = sc.load_scenario(write(tmp_path, far + "\n[sim]\nmerge_gap_tol = 1e-3\n"))
    assert scenario.sim.merge_gap_tol == 1e-3


def test_eps_override_needs_a_regularized_system(tmp_path):
    with pytest.raises(ScenarioError, match="--eps"):
        sc.load_scenario(write(tmp_path, BASE), {"eps": [0.1]})
