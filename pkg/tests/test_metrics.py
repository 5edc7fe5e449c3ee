"""Trajectory error statistics and waypoint summaries."""

import math
from collections import namedtuple
from types import SimpleNamespace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from serpent.metrics import (
    AssociationError,
    ErrorReport,
    TimedTrajectory,
    align_trajectory,
    associate,
    error_stats,
    tracking_summary,
)


def traj(times, positions, yaws=None):
    times = np.asarray(times, dtype=float)
    positions = np.asarray(positions, dtype=float)
    if yaws is None:
        yaws = np.zeros(len(times))
    return TimedTrajectory(times, positions, np.asarray(yaws, dtype=float))


def straight(n, dt=0.01, start=0.0):
    t = start + dt * np.arange(n)
    p = np.column_stack([np.linspace(0, 1, n), np.zeros(n), np.zeros(n)])
    return traj(t, p)


# ------------------------------------------------------------- construction

def test_trajectory_requires_increasing_time():
    with pytest.raises(ValueError):
        traj([0.0, 0.0], np.zeros((2, 3)))
    with pytest.raises(ValueError):
        traj([0.0, -0.1], np.zeros((2, 3)))


def test_trajectory_requires_3d_positions():
    with pytest.raises(ValueError):
        TimedTrajectory(np.array([0.0]), np.zeros((1, 2)), np.array([0.0]))


# ---------------------------------------------------------------- associate

def test_associate_identical_grids_identity():
    a = straight(50)
    pairs, dropped = associate(a, straight(50), max_dt=0.02)
    assert pairs == [(i, i) for i in range(50)]
    assert dropped == 0


def test_associate_nested_grids():
    est = straight(25, dt=0.02)
    ref = straight(50, dt=0.01)
    pairs, dropped = associate(est, ref, max_dt=0.02)
    assert pairs == [(i, 2 * i) for i in range(25)]
    assert dropped == 0


def test_associate_offset_beyond_tolerance_errors():
    est = traj([0.0], np.zeros((1, 3)))
    ref = traj([0.5 + 1e-6], np.zeros((1, 3)))
    with pytest.raises(AssociationError):
        associate(est, ref, max_dt=0.5)
    # every sample beyond tolerance, multi-sample variant
    est = straight(10, dt=1.0)
    ref = straight(10, dt=1.0, start=9.0 + 0.5 + 1e-6)
    with pytest.raises(AssociationError):
        associate(est, ref, max_dt=0.5)


def test_associate_counts_dropped_tail():
    est = straight(20, dt=0.1)
    ref = straight(10, dt=0.1)  # covers only the first second
    pairs, dropped = associate(est, ref, max_dt=0.02)
    assert len(pairs) == 10
    assert dropped == 10


def test_associate_symmetric_count_on_shared_grid():
    a, b = straight(30), straight(30)
    ab = associate(a, b, max_dt=0.02)
    ba = associate(b, a, max_dt=0.02)
    assert len(ab.pairs) == len(ba.pairs)


# --------------------------------------------------------------- error_stats

def test_stats_zero_for_identical():
    a = straight(40)
    pairs, _ = associate(a, a, max_dt=0.02)
    rep = error_stats(pairs, a, a)
    assert rep.max_abs == 0.0 and rep.mean == 0.0 and rep.rmse == 0.0


def test_stats_constant_offset():
    a = straight(40)
    shifted = traj(a.times, a.positions + np.array([0.0, 0.05, 0.0]), a.yaws)
    pairs, _ = associate(shifted, a, max_dt=0.02)
    rep = error_stats(pairs, shifted, a)
    assert rep.max_abs == pytest.approx(0.05)
    assert rep.mean == pytest.approx(0.05)
    assert rep.rmse == pytest.approx(0.05)


def test_stats_two_sample_fixture():
    ref = traj([0.0, 1.0], np.zeros((2, 3)))
    est = traj([0.0, 1.0], np.array([[0.03, 0.0, 0.0], [0.0, 0.04, 0.0]]))
    rep = error_stats([(0, 0), (1, 1)], est, ref)
    assert rep.mean == pytest.approx(0.035, abs=1e-12)
    assert rep.rmse == pytest.approx(math.sqrt(0.00125), abs=1e-6)
    assert rep.max_abs == pytest.approx(0.04, abs=1e-12)


def test_stats_per_axis_series():
    ref = traj([0.0, 1.0], np.zeros((2, 3)))
    est = traj([0.0, 1.0], np.array([[0.01, -0.02, 0.03], [0.0, 0.0, 0.0]]))
    rep = error_stats([(0, 0), (1, 1)], est, ref)
    t, ex, ey, ez = rep.per_axis_series[0]
    assert (t, ex, ey, ez) == (0.0, pytest.approx(0.01), pytest.approx(-0.02), pytest.approx(0.03))
    assert len(rep.per_axis_series) == 2


def test_stats_requires_pairs():
    a = straight(5)
    with pytest.raises(ValueError):
        error_stats([], a, a)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 10.0), min_size=1, max_size=40))
def test_rmse_at_least_mean_at_most_max(norms):
    n = len(norms)
    ref = traj(np.arange(n), np.zeros((n, 3)))
    est = traj(np.arange(n), np.column_stack([norms, np.zeros(n), np.zeros(n)]))
    rep = error_stats([(i, i) for i in range(n)], est, ref)
    assert rep.rmse >= rep.mean - 1e-12
    assert rep.max_abs >= rep.rmse - 1e-12
    assert rep.mean >= 0.0


def test_stats_rigid_transform_invariant():
    rng = np.random.default_rng(7)
    n = 30
    base = traj(np.arange(n), rng.normal(size=(n, 3)))
    est = traj(np.arange(n), base.positions + rng.normal(scale=0.01, size=(n, 3)))
    pairs = [(i, i) for i in range(n)]
    rep0 = error_stats(pairs, est, base)

    ang = 0.83
    rot = np.array([[math.cos(ang), -math.sin(ang), 0.0],
                    [math.sin(ang), math.cos(ang), 0.0],
                    [0.0, 0.0, 1.0]])
    shift = np.array([3.0, -1.0, 0.4])
    moved_est = traj(est.times, est.positions @ rot.T + shift)
    moved_ref = traj(base.times, base.positions @ rot.T + shift)
    rep1 = error_stats(pairs, moved_est, moved_ref)
    assert rep1.mean == pytest.approx(rep0.mean, abs=1e-12)
    assert rep1.rmse == pytest.approx(rep0.rmse, abs=1e-12)
    assert rep1.max_abs == pytest.approx(rep0.max_abs, abs=1e-12)


# -------------------------------------------------------------------- align

def test_alignment_recovers_rigid_offset():
    rng = np.random.default_rng(3)
    n = 40
    ref = traj(np.arange(n), rng.normal(size=(n, 3)))
    ang = -0.4
    rot = np.array([[math.cos(ang), -math.sin(ang), 0.0],
                    [math.sin(ang), math.cos(ang), 0.0],
                    [0.0, 0.0, 1.0]])
    est = traj(ref.times, ref.positions @ rot.T + np.array([1.0, 2.0, -0.5]))
    pairs = [(i, i) for i in range(n)]
    raw = error_stats(pairs, est, ref)
    assert raw.rmse > 0.5
    aligned = align_trajectory(est, ref, pairs)
    rep = error_stats(pairs, aligned, ref)
    assert rep.rmse < 1e-9


# --------------------------------------------------------- tracking_summary

Row = namedtuple("Row", "t mode wp_index kind delta d_e psi_e_rel psi_e_abs psi_e")


def fake_log(rows, timed_out=False):
    return SimpleNamespace(status_rows=rows, timed_out=timed_out)


def test_summary_single_reached_waypoint():
    rows = [
        Row(1.0, "sidewind", 1, "sidewind", 0.24, 2.0, 0.0, 0.1, 0.05),
        Row(2.0, "sidewind", 1, "sidewind", 0.24, 1.0, 0.0, 0.1, 0.05),
        Row(3.0, "sidewind", 1, "waypoint_reached", None, 0.3, 0.0, 0.1, 0.05),
        Row(4.0, "sidewind", 2, "stop", None, 0.18, 0.0, 0.08, 0.08),
    ]
    summary = tracking_summary(fake_log(rows), n_waypoints=1)
    assert len(summary) == 1
    row = summary[0]
    assert row.reached and row.waypoint == 1
    assert row.time_to_reach == 3.0
    assert row.final_distance == pytest.approx(0.18)  # last row while relevant
    assert row.final_abs_yaw_error == pytest.approx(0.08)
    assert row.mode_switches == 0


def test_summary_counts_mode_switches_and_orders_rows():
    rows = [
        Row(1.0, "sidewind", 1, "sidewind", 0.2, 3.0, 0.5, 0.5, 0.5),
        Row(2.0, "turn_far", 1, "turn_left", None, 3.0, 0.9, 0.9, 0.9),
        Row(3.0, "sidewind", 1, "sidewind", 0.2, 2.0, 0.1, 0.1, 0.1),
        Row(4.0, "sidewind", 1, "waypoint_reached", None, 0.3, 0.0, 0.1, 0.1),
        Row(5.0, "sidewind", 2, "sidewind", 0.2, 2.0, 0.0, 0.1, 0.1),
        Row(6.0, "sidewind", 2, "waypoint_reached", None, 0.25, 0.0, 0.05, 0.05),
        Row(7.0, "sidewind", 3, "stop", None, 0.25, 0.0, 0.05, 0.05),
    ]
    summary = tracking_summary(fake_log(rows), n_waypoints=2)
    assert [r.waypoint for r in summary] == [1, 2]
    assert summary[0].mode_switches == 2
    assert summary[0].time_to_reach == 4.0
    assert summary[1].time_to_reach == 6.0
    assert all(r.reached for r in summary)


def test_summary_flags_unreached_waypoint():
    rows = [
        Row(1.0, "sidewind", 1, "sidewind", 0.2, 3.0, 0.5, 0.5, 0.5),
        Row(2.0, "sidewind", 1, "sidewind", 0.2, 2.5, 0.5, 0.5, 0.5),
    ]
    summary = tracking_summary(fake_log(rows, timed_out=True), n_waypoints=2)
    assert len(summary) == 2
    assert not summary[0].reached and summary[0].time_to_reach is None
    assert not summary[1].reached
