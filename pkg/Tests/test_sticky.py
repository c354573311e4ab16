import numpy as np
import pytest

import kernel
from errors import OrderingError
from integrate import SimConfig
from state import PeakonState
from sticky import (
    PAIR_RIGHT,
    MergePartition,
    classify_triple_collision,
    detect_groups,
    evolve_sticky,
    evolve_until_collision,
    max_sample_speed,
    merge,
    speed_consistency,
)


@pytest.fixture(scope="module")
def fig1a_run():
    initial = PeakonState.from_positions(0.0, [-2.0, -1.0, 0.0], [15.0, 2.0, 3.0])
    return evolve_sticky(initial, SimConfig(dt=1e-3, t_end=2.0))


def test_detect_groups_chains_small_gaps():
    state = PeakonState(0.0, 0.0, [1e-10, 1.0, 5e-10, 2e-10], [1.0, 2.0, 3.0, 4.0, 5.0])
    partition = detect_groups(state, 1e-9)
    assert partition.groups == ((0, 1), (2, 3, 4))
    assert partition.representatives == (0, 2)
    assert list(partition.owner()) == [0, 0, 1, 1, 1]
    assert not partition.is_trivial


def test_merge_sums_momenta_and_keeps_leftmost_position():
    state = PeakonState(0.5, 1.0, [2.0, 1e-10, 3.0], [1.0, 2.0, -0.5, 4.0])
    merged = merge(state, detect_groups(state, 1e-9))
    assert merged.momenta.tolist() == [1.0, 1.5, 4.0]
    assert merged.positions == pytest.approx([1.0, 3.0, 6.0 + 1e-10])
    assert merged.t == 0.5
    assert merged.m0 == state.m0


@pytest.mark.parametrize(
    "groups",
    [
        ((0,), (2,), (1,)),  # not in order
        ((0, 1), (2,)),  # spans the wide gap
        ((0,), (1,), (2,)),  # leaves a closed gap unmerged
    ],
)
def test_merge_rejects_bad_partitions(groups):
    state = PeakonState(0.0, 0.0, [1.0, 1e-12], [1.0, 2.0, 3.0])
    with pytest.raises(OrderingError):
        merge(state, MergePartition(groups, 1e-9))


def test_fig1a_right_pair_merges(fig1a_run):
    assert len(fig1a_run.events) == 1
    event = fig1a_run.events[0]
    assert 0.0 < event.t < 2.0
    assert event.partition.groups == ((0,), (1, 2))
    assert event.post_state.momenta.tolist() == [15.0, 5.0]
    assert classify_triple_collision(event) == PAIR_RIGHT
    assert all(v < 0.0 for v in event.closing_speeds)
    assert event.energy_jump <= 1e-8


def test_fig1a_energy_is_conserved(fig1a_run):
    h0 = kernel.energy(fig1a_run.initial)
    drift = max(abs(kernel.energy(s) - h0) for s in fig1a_run.samples) / abs(h0)
    assert drift <= 1e-6
    assert fig1a_run.t_final == 2.0


def test_fig1a_total_momentum_and_times(fig1a_run):
    assert all(s.total_momentum == pytest.approx(20.0) for s in fig1a_run.samples)
    assert np.all(np.diff(fig1a_run.times) > 0.0)


def test_lineage_and_positions_at(fig1a_run):
    assert fig1a_run.lineage[1].tolist() == [0, 1, 1]
    t = 1.5
    x = fig1a_run.positions_at(t)
    assert x[1] == x[2]
    s = int(np.argmin(np.abs(fig1a_run.times - t)))
    assert fig1a_run.original_positions(s) == pytest.approx(
        fig1a_run.positions_at(fig1a_run.times[s]), abs=1e-12
    )
    with pytest.raises(ValueError):
        fig1a_run.positions_at(3.0)


def test_speed_bound(fig1a_run, fig1b):
    bound = 0.5 * fig1a_run.initial.m0**2
    assert max_sample_speed(fig1a_run) <= bound + 1e-6
    other = evolve_sticky(fig1b, SimConfig(dt=1e-3, t_end=2.0))
    assert len(other.events) >= 1
    assert max_sample_speed(other) <= 0.5 * fig1b.m0**2 + 1e-6


def test_post_merge_epoch_follows_the_formula(fig1a_run):
    assert speed_consistency(fig1a_run, sample_count=100) <= 1e-3 * fig1a_run.initial.m0**2


def test_fig1b_energy_across_merges(fig1b):
    run = evolve_sticky(fig1b, SimConfig(dt=1e-3, t_end=2.0))
    h0 = kernel.energy(fig1b)
    assert max(abs(kernel.energy(s) - h0) for s in run.samples) <= 1e-6 * abs(h0)
    assert all(e.energy_jump <= 1e-8 for e in run.events)


def test_nonconservative_run_stops_at_first_collision(fig1a):
    run = evolve_until_collision(fig1a, SimConfig(dt=1e-3, t_end=2.0))
    assert run.events == []
    assert run.stop_event is not None
    assert run.t_final == pytest.approx(run.stop_event.t_event)
    assert run.stop_event.indices == ((0, 1),)


def test_nothing_happens_to_a_lone_peakon():
    state = PeakonState.from_positions(0.0, [0.0], [3.0])
    run = evolve_sticky(state, SimConfig(dt=0.1, t_end=1.0))
    assert run.events == []
    assert run.positions_at(0.55) == pytest.approx([0.0])


def test_merge_happens_at_contact(fig1a_run):
    event = fig1a_run.events[0]
    assert event.pre_state.gaps[1] <= 1e-10
    assert event.energy_jump <= 2e-9


@pytest.mark.parametrize(
    "name, t_first",
    [("fig1a", 0.12934140475373723), ("fig1b", 0.20491110975481586)],
)
def test_first_merge_times_are_stable(fig1a, fig1b, name, t_first):
    initial = fig1a if name == "fig1a" else fig1b
    run = evolve_sticky(initial, SimConfig(dt=1e-3, t_end=2.0))
    assert run.events[0].t == pytest.approx(t_first, abs=1e-8)


def test_separating_pair_below_tolerance_never_merges():
    # gap 5e-10 < merge_gap_tol, but the faster peakon is in front
    state = PeakonState.from_positions(0.0, [0.0, 5e-10, 3.0], [1.0, 3.0, 0.5])
    run = evolve_sticky(state, SimConfig(dt=1e-3, t_end=0.05))
    assert run.events == []
    assert run.samples[-1].gaps[0] > 5e-10
