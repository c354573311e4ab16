import math

import numpy as np
import pytest

import dynamics
import kernel
from errors import OrderingError
from integrate import ch_step
from state import PeakonState, velocities_from_rates


def test_fast_constants_match_pairwise_table(rng, random_state):
    for _ in range(200):
        state = random_state(rng)
        robust = dynamics.interval_constants(state).values
        fast = dynamics.interval_constants_fast(state).values
        assert robust[0] == robust[-1] == 0.0
        np.testing.assert_allclose(fast, robust, rtol=0.0, atol=1e-12 * state.m0**2)


def test_fast_constants_survive_wide_spreads():
    x = np.linspace(0.0, 2000.0, 6)
    state = PeakonState.from_positions(0.0, x, [1.0, -2.0, 3.0, 1.0, 2.0, -1.0])
    c = dynamics.interval_constants_fast(state).values
    assert np.all(np.isfinite(c))
    assert np.all(np.abs(c) < 1e-150)


def test_two_peakons_move_together():
    state = PeakonState.from_positions(0.0, [0.0, math.log(2.0)], [1.0, 1.0])
    v = dynamics.mch_conservative_rhs(state)
    assert v == pytest.approx([0.25, 0.25], abs=1e-15)
    assert dynamics.conservative_flow(state)[1] == pytest.approx(0.0, abs=1e-15)


def test_single_peakon_speeds():
    state = PeakonState.from_positions(0.0, [1.0], [3.0])
    assert dynamics.mch_conservative_rhs(state) == pytest.approx([0.0])
    assert dynamics.mch_nonconservative_rhs(state) == pytest.approx([1.5])


def test_velocities_match_pair_table(rng, random_state):
    for _ in range(200):
        state = random_state(rng)
        speeds = dynamics.speed_table(dynamics.pair_couplings(state))
        np.testing.assert_allclose(
            speeds, dynamics.mch_conservative_rhs(state), rtol=0.0, atol=1e-12 * state.m0**2
        )


def test_algebraic_identities(rng, random_state):
    for _ in range(1000):
        state = random_state(rng)
        m2 = state.m0**2
        assert abs(dynamics.alternating_identity_residual(state)) <= 1e-12 * m2
        assert abs(dynamics.energy_identity_residual(state)) <= 1e-12 * m2**2


def test_identities_need_two_peakons():
    with pytest.raises(ValueError):
        dynamics.alternating_identity_residual(PeakonState.from_positions(0.0, [0.0], [1.0]))


@pytest.mark.parametrize(
    "flow, rhs",
    [
        (dynamics.conservative_flow, dynamics.mch_conservative_rhs),
        (dynamics.nonconservative_flow, dynamics.mch_nonconservative_rhs),
    ],
)
def test_flows_are_velocities_in_gap_coordinates(rng, random_state, flow, rhs):
    for _ in range(50):
        state = random_state(rng)
        np.testing.assert_allclose(
            velocities_from_rates(flow(state)), rhs(state), rtol=0.0, atol=1e-11 * state.m0**2
        )


def test_speed_formulas_at_the_peaks(rng, random_state):
    for _ in range(50):
        state = random_state(rng)
        tol = 1e-11 * state.m0**2
        np.testing.assert_allclose(
            dynamics.peak_speed_formula(state), dynamics.mch_conservative_rhs(state), atol=tol
        )
        np.testing.assert_allclose(
            dynamics.peak_speed_formula(state, conservative=False),
            dynamics.mch_nonconservative_rhs(state),
            atol=tol,
        )


def test_singular_value_of_a_lone_peakon():
    state = PeakonState.from_positions(0.0, [0.0], [2.0])
    # slopes +1 and -1: bar(u_x^2) = 1, bar(u_x) = 0
    assert dynamics.nonconservative_singular_value(state) == pytest.approx([1.0 / 3.0])


def test_unordered_state_is_rejected():
    crossed = PeakonState(0.0, 0.0, [0.5, -0.1], [1.0, 2.0, 3.0], strict=False)
    with pytest.raises(OrderingError):
        dynamics.interval_constants(crossed)
    with pytest.raises(OrderingError):
        dynamics.mch_conservative_rhs(crossed)
    assert np.all(np.isfinite(dynamics.conservative_flow(crossed)))


def test_ch_single_peakon_travels_at_its_height():
    dx, dp = dynamics.ch_rhs([0.5], [2.0])
    assert dx == pytest.approx([2.0])
    assert dp == pytest.approx([0.0])


def test_ch_coincident_peakons_exert_no_force():
    dx, dp = dynamics.ch_rhs([1.0, 1.0], [3.0, 1.0])
    assert dx == pytest.approx([4.0, 4.0])
    assert np.all(dp == 0.0)


def test_ch_hamiltonian_is_stationary(rng):
    x = np.sort(rng.uniform(-3.0, 3.0, 4))
    p = rng.uniform(-2.0, 2.0, 4)
    dt = 1e-4
    x1, p1 = ch_step(x, p, dt)
    rate = (dynamics.ch_hamiltonian(x1, p1) - dynamics.ch_hamiltonian(x, p)) / dt
    assert abs(rate) <= 1e-9
    assert dynamics.ch_hamiltonian(x, p) == pytest.approx(kernel.energy_arrays(x, p))
