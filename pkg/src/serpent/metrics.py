"""Trajectory comparison statistics and tracking-run summaries.

Compares an estimated pose sequence against a reference by pairing
nearest timestamps, then reporting max / mean / RMSE of the Euclidean
position error. Comparison happens in the shared world frame by
default; an optional rigid pre-alignment is available but off unless
requested, since the systems under study share one frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

__all__ = [
    "AssociationError",
    "AssociationResult",
    "ErrorReport",
    "TimedTrajectory",
    "WaypointSummary",
    "align_trajectory",
    "associate",
    "error_stats",
    "tracking_summary",
]

DEFAULT_MAX_DT_S = 0.02


class AssociationError(ValueError):
    """No sample pairs found within the timestamp tolerance."""


@dataclass(frozen=True)
class TimedTrajectory:
    """Timestamped 3D positions with yaw. Timestamps strictly increase."""

    times: np.ndarray
    positions: np.ndarray
    yaws: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        p = np.asarray(self.positions, dtype=float)
        y = np.asarray(self.yaws, dtype=float)
        if t.ndim != 1 or len(t) == 0:
            raise ValueError("need at least one sample")
        if p.shape != (len(t), 3):
            raise ValueError("positions must be (n, 3)")
        if y.shape != (len(t),):
            raise ValueError("yaws must match the time vector")
        if np.any(np.diff(t) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "positions", p)
        object.__setattr__(self, "yaws", y)

    def __len__(self) -> int:
        return len(self.times)


class AssociationResult(NamedTuple):
    pairs: list[tuple[int, int]]
    dropped: int


def associate(
    est: TimedTrajectory,
    ref: TimedTrajectory,
    max_dt: float = DEFAULT_MAX_DT_S,
) -> AssociationResult:
    """Pair each estimate sample with the nearest-in-time reference sample.

    Samples without a reference within max_dt are dropped and counted.
    Raises AssociationError when nothing pairs at all.
    """
    idx = np.searchsorted(ref.times, est.times)
    pairs: list[tuple[int, int]] = []
    dropped = 0
    for i, t in enumerate(est.times):
        candidates = []
        j = idx[i]
        if j > 0:
            candidates.append(j - 1)
        if j < len(ref):
            candidates.append(j)
        best = min(candidates, key=lambda k: abs(ref.times[k] - t))
        if abs(ref.times[best] - t) <= max_dt:
            pairs.append((i, best))
        else:
            dropped += 1
    if not pairs:
        raise AssociationError(
            f"no samples pair within {max_dt} s; trajectories may not overlap"
        )
    return AssociationResult(pairs, dropped)


@dataclass(frozen=True)
class ErrorReport:
    max_abs: float
    mean: float
    rmse: float
    per_axis_series: list[tuple[float, float, float, float]]
    count: int

    def summary_lines(self) -> list[str]:
        return [
            f"samples compared: {self.count}",
            f"max abs error:  {self.max_abs:.6f} m",
            f"mean error:     {self.mean:.6f} m",
            f"rmse:           {self.rmse:.6f} m",
        ]


def error_stats(
    pairs: Sequence[tuple[int, int]],
    est: TimedTrajectory,
    ref: TimedTrajectory,
) -> ErrorReport:
    """Max / mean / RMSE of per-pair position error norms.

    Mean is the mean of norms (not per-axis means), so RMSE >= mean by
    the power-mean inequality; that relation is asserted.
    """
    if len(pairs) == 0:
        raise ValueError("error_stats needs at least one associated pair")
    ei = np.fromiter((i for i, _ in pairs), dtype=int, count=len(pairs))
    ri = np.fromiter((j for _, j in pairs), dtype=int, count=len(pairs))
    diffs = est.positions[ei] - ref.positions[ri]
    norms = np.linalg.norm(diffs, axis=1)
    mean = float(np.mean(norms))
    rmse = float(np.sqrt(np.mean(norms**2)))
    assert rmse >= mean - 1e-12
    series = [
        (float(est.times[i]), float(dx), float(dy), float(dz))
        for i, (dx, dy, dz) in zip(ei, diffs)
    ]
    return ErrorReport(
        max_abs=float(np.max(norms)),
        mean=mean,
        rmse=rmse,
        per_axis_series=series,
        count=len(pairs),
    )


def align_trajectory(
    est: TimedTrajectory,
    ref: TimedTrajectory,
    pairs: Sequence[tuple[int, int]],
) -> TimedTrajectory:
    """Rigidly fit est onto ref over the paired samples (SVD, no scale).

    Returns the transformed copy of est. Reflections are excluded by
    construction.
    """
    if len(pairs) < 3:
        raise ValueError("alignment needs at least 3 pairs")
    ei = [i for i, _ in pairs]
    ri = [j for _, j in pairs]
    a = est.positions[ei]
    b = ref.positions[ri]
    ca, cb = a.mean(axis=0), b.mean(axis=0)
    h = (a - ca).T @ (b - cb)
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(vt.T @ u.T))
    rot = vt.T @ np.diag([1.0, 1.0, d]) @ u.T
    shift = cb - rot @ ca
    return TimedTrajectory(est.times, est.positions @ rot.T + shift, est.yaws)


class WaypointSummary(NamedTuple):
    waypoint: int
    reached: bool
    time_to_reach: float | None
    final_distance: float | None
    final_abs_yaw_error: float | None
    mode_switches: int


def tracking_summary(log, n_waypoints: int) -> list[WaypointSummary]:
    """Per-waypoint digest of a tracking run.

    log duck-types the simulator's TrajectoryLog: it carries status_rows
    (records with t, mode, wp_index, kind, d_e, psi_e_abs fields, one per
    slow tick) plus a timed_out flag. For waypoint k the relevant rows run
    from its activation until the row after its reach event (the post-reach
    row reflects the settled state for the final waypoint); unreached
    waypoints are flagged rather than omitted.
    """
    rows = list(log.status_rows)
    out: list[WaypointSummary] = []
    for k in range(1, n_waypoints + 1):
        active = [r for r in rows if r.wp_index == k]
        reach_rows = [r for r in active if r.kind == "waypoint_reached"]
        if not reach_rows:
            out.append(WaypointSummary(k, False, None,
                                       active[-1].d_e if active else None,
                                       active[-1].psi_e_abs if active else None,
                                       _mode_switches(active)))
            continue
        reach_t = reach_rows[0].t
        later = [r for r in rows if r.t > reach_t]
        settle = later[-1] if (k == n_waypoints and later) else reach_rows[0]
        # for intermediate waypoints the reach row is the settled state;
        # for the last one the run keeps logging through the stop tick
        final_d = settle.d_e if k == n_waypoints else reach_rows[0].d_e
        final_psi = settle.psi_e_abs if k == n_waypoints else reach_rows[0].psi_e_abs
        out.append(WaypointSummary(k, True, reach_t, final_d, final_psi,
                                   _mode_switches(active)))
    return out


def _mode_switches(rows) -> int:
    switches = 0
    for prev, cur in zip(rows, rows[1:]):
        if cur.mode != prev.mode:
            switches += 1
    return switches
