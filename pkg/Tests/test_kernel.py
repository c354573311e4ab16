import math

import numpy as np
import pytest

import kernel
import quadrature
from state import PeakonState


def test_two_peakon_field_by_hand():
    state = PeakonState.from_positions(0.0, [0.0, math.log(2.0)], [1.0, 1.0])
    sample = kernel.eval_field(state, 0.0)
    assert sample.u == pytest.approx(0.75, abs=1e-15)
    assert sample.ux_left == pytest.approx(0.75, abs=1e-15)
    assert sample.ux_right == pytest.approx(-0.25, abs=1e-15)


def test_far_field_decays():
    state = PeakonState.from_positions(0.0, [0.0], [3.0])
    u, _, _ = kernel.field_values(state, [60.0, -60.0])
    assert np.all(np.abs(u) < 1e-25)


def test_slope_jump_equals_momentum(rng, random_state):
    for _ in range(50):
        state = random_state(rng)
        for s, p in zip(kernel.peak_samples(state), state.momenta):
            assert s.ux_left - s.ux_right == pytest.approx(p, abs=1e-12)


def test_peak_samples_match_pointwise_queries(rng, random_state):
    state = random_state(rng)
    for s in kernel.peak_samples(state):
        direct = kernel.eval_field(state, s.x)
        assert s.u == pytest.approx(direct.u, abs=1e-12)
        assert s.ux_left == pytest.approx(direct.ux_left, abs=1e-12)
        assert s.ux_right == pytest.approx(direct.ux_right, abs=1e-12)


def test_one_sided_slopes_match_finite_differences():
    state = PeakonState.from_positions(0.0, [-1e-3, 0.0, 1e-3], [5.0, -4.0, 3.0])
    mid = kernel.peak_samples(state)[1]
    h = 1e-7
    u = lambda x: kernel.eval_field(state, x).u  # noqa: E731
    assert mid.ux_left == pytest.approx((u(0.0) - u(-h)) / h, abs=1e-5)
    assert mid.ux_right == pytest.approx((u(h) - u(0.0)) / h, abs=1e-5)


def test_averages():
    state = PeakonState.from_positions(0.0, [0.0, math.log(2.0)], [1.0, 1.0])
    assert kernel.avg_ux(state, 0.0) == pytest.approx(0.25)
    assert kernel.avg_ux_sq(state, 0.0) == pytest.approx(0.5 * (0.75**2 + 0.25**2))


def test_energy_closed_form():
    state = PeakonState.from_positions(0.0, [0.0, math.log(2.0)], [1.0, 1.0])
    assert kernel.energy(state) == pytest.approx(1.5, abs=1e-15)
    assert kernel.energy(PeakonState.from_positions(0.0, [3.0], [4.0])) == 8.0


def test_energy_matches_quadrature(rng, random_state):
    for _ in range(20):
        state = random_state(rng)
        exact = kernel.energy(state)
        assert kernel.energy_by_quadrature(state) == pytest.approx(exact, rel=1e-10, abs=1e-10)


def test_coincident_energy_is_the_collapsed_limit():
    momenta = [5.0, -4.0, 3.0]
    assert kernel.coincident_energy(momenta) == 8.0
    assert kernel.energy_arrays([0.0, 0.0, 0.0], momenta) == pytest.approx(8.0, abs=1e-14)


def test_panel_rule_integrates_polynomials_exactly():
    x, w = quadrature.panel_rule([0.0, 0.5, 2.0], order=4, panels=3)
    assert np.sum(w) == pytest.approx(2.0)
    assert np.sum(w * x**7) == pytest.approx(2.0**8 / 8.0)


def test_panel_rule_ignores_repeated_breakpoints():
    a = quadrature.panel_rule([0.0, 1.0, 1.0, 2.0])
    b = quadrature.panel_rule([0.0, 1.0, 2.0])
    assert np.array_equal(a[0], b[0])
    assert quadrature.integrate(np.cos, [1.0, 1.0]) == 0.0
