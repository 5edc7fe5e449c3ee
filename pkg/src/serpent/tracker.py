"""Waypoint tracking state machine.

A slow-rate decision loop over three locomotion modes. Far from the
target the robot sidewinds with proportional steering and only breaks
into a turn-in-place when the blended yaw error is large; near the
target it insists on heading alignment before declaring the waypoint
reached. The blended error trades the bearing-to-target (useful far
away) against the commanded final heading (what matters on arrival)
through a distance-dependent weight.

The turn entry threshold (40 deg) sits above the exit threshold
(30 deg): a constant error between the two can hold the current mode
forever but never toggles it, so there is no chattering.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Sequence

import numpy as np

from .estimation import wrap_angle as wrap

__all__ = [
    "CommandKind",
    "Mode",
    "Pose2D",
    "TrackerCommand",
    "TrackerConfig",
    "TrackerState",
    "TrackingErrors",
    "TurnDirection",
    "Waypoint",
    "blend_weight",
    "compute_errors",
    "smoothstep",
    "tick",
    "wrap",
]

_DEG = math.pi / 180.0

DEFAULT_BREAKPOINTS = (0.0, 0.5, 1.0, 1.5)
DEFAULT_PLATEAU = 0.5


def smoothstep(t: float) -> float:
    """Cubic easing 3t^2 - 2t^3 on [0, 1]; input clamped first.

    Zero slope at both ends, which is what makes the piecewise blend
    weight below continuously differentiable at its junctions.
    """
    t = min(1.0, max(0.0, t))
    return t * t * (3.0 - 2.0 * t)


def blend_weight(
    d: float,
    breakpoints: Sequence[float] = DEFAULT_BREAKPOINTS,
    plateau: float = DEFAULT_PLATEAU,
) -> float:
    """Distance-dependent weight on the absolute-heading error.

    1 at the target, easing down to a mid plateau, easing again to 0
    beyond the last breakpoint. Negative distances count as zero.
    """
    b0, b1, b2, b3 = breakpoints
    if d <= b0:
        return 1.0
    if d <= b1:
        return 1.0 - (1.0 - plateau) * smoothstep((d - b0) / (b1 - b0))
    if d <= b2:
        return plateau
    if d <= b3:
        return plateau * (1.0 - smoothstep((d - b2) / (b3 - b2)))
    return 0.0


class Mode(enum.Enum):
    SIDEWIND = 1
    TURN_FAR = 2
    TURN_NEAR = 3


class TurnDirection(enum.Enum):
    LEFT = "left"
    RIGHT = "right"


class CommandKind(enum.Enum):
    SIDEWIND_WITH_STEERING = "sidewind"
    TURN_LEFT = "turn_left"
    TURN_RIGHT = "turn_right"
    WAYPOINT_REACHED = "waypoint_reached"
    STOP = "stop"


@dataclass(frozen=True)
class TrackerCommand:
    kind: CommandKind
    delta: float | None = None

    def __post_init__(self):
        if (self.kind is CommandKind.SIDEWIND_WITH_STEERING) != (self.delta is not None):
            raise ValueError("delta is carried by steering commands only")


class Pose2D(NamedTuple):
    """Planar pose of the navigation point (virtual-chassis origin)."""

    x: float
    y: float
    yaw: float


@dataclass(frozen=True)
class Waypoint:
    position: np.ndarray
    target_yaw: float

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float)
        if pos.shape != (2,):
            raise ValueError("waypoint position must be a 2-vector")
        object.__setattr__(self, "position", pos)
        if not -math.pi <= self.target_yaw <= math.pi:
            raise ValueError("target yaw must lie in [-pi, pi]")


@dataclass(frozen=True)
class TrackerConfig:
    """Thresholds and gains of the tracking state machine.

    distance_threshold splits the far/near branches. The two yaw
    thresholds implement hysteresis: turns engage above
    yaw_threshold_turn and release below yaw_threshold_waypoint.
    turn_exit_delta is the auxiliary entry trigger on the unclamped
    proportional steering term.
    """

    distance_threshold: float = 0.35
    yaw_threshold_waypoint: float = 30 * _DEG
    yaw_threshold_turn: float = 40 * _DEG
    delta0: float = 14 * _DEG
    delta_limit: float = 7 * _DEG
    k_p: float = 1.0
    turn_exit_delta: float = 20 * _DEG
    blend_breakpoints: tuple[float, float, float, float] = DEFAULT_BREAKPOINTS
    blend_plateau: float = DEFAULT_PLATEAU
    rel_error_deadband: float = 0.01
    left_on_positive_error: bool = True

    def __post_init__(self):
        if self.distance_threshold <= 0:
            raise ValueError("distance_threshold must be positive")
        if not 0 < self.yaw_threshold_waypoint < self.yaw_threshold_turn:
            raise ValueError(
                "need 0 < yaw_threshold_waypoint < yaw_threshold_turn (hysteresis)"
            )
        if self.delta_limit <= 0 or self.k_p < 0:
            raise ValueError("delta_limit must be positive, k_p non-negative")
        bp = tuple(float(b) for b in self.blend_breakpoints)
        if len(bp) != 4 or any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("blend_breakpoints must be 4 increasing values")
        object.__setattr__(self, "blend_breakpoints", bp)
        if not 0 < self.blend_plateau < 1:
            raise ValueError("blend_plateau must lie in (0, 1)")


class TrackingErrors(NamedTuple):
    d_e: float
    psi_e_rel: float
    psi_e_abs: float
    psi_e: float


@dataclass(frozen=True)
class TrackerState:
    """Immutable snapshot of the tracker between slow-loop ticks.

    waypoint_index is 1-based; finished holds exactly when it has
    walked past the last waypoint.
    """

    waypoint_index: int = 1
    mode: Mode = Mode.SIDEWIND
    turn_direction: TurnDirection | None = None
    last_delta: float | None = None
    last_errors: TrackingErrors | None = None
    finished: bool = False
    stale: bool = False

    @classmethod
    def initial(cls) -> "TrackerState":
        return cls()

    def begin_turn(self, mode: Mode, direction: TurnDirection) -> "TrackerState":
        return replace(self, mode=mode, turn_direction=direction)


def compute_errors(pose: Pose2D, wp: Waypoint, config: TrackerConfig) -> TrackingErrors:
    """Distance, bearing error, heading error, and their blend."""
    dx = wp.position[0] - pose.x
    dy = wp.position[1] - pose.y
    d_e = math.hypot(dx, dy)
    if d_e < config.rel_error_deadband:
        # bearing is numerically meaningless on top of the waypoint
        psi_e_rel = 0.0
    else:
        psi_e_rel = wrap(math.atan2(dy, dx) - pose.yaw)
    psi_e_abs = wrap(wp.target_yaw - pose.yaw)
    w = blend_weight(d_e, config.blend_breakpoints, config.blend_plateau)
    psi_e = wrap(w * psi_e_abs + (1.0 - w) * psi_e_rel)
    return TrackingErrors(d_e, psi_e_rel, psi_e_abs, psi_e)


def _turn(config: TrackerConfig, positive_error: bool) -> TurnDirection:
    if config.left_on_positive_error:
        return TurnDirection.LEFT if positive_error else TurnDirection.RIGHT
    return TurnDirection.RIGHT if positive_error else TurnDirection.LEFT


def _turn_command(direction: TurnDirection) -> TrackerCommand:
    kind = (
        CommandKind.TURN_LEFT
        if direction is TurnDirection.LEFT
        else CommandKind.TURN_RIGHT
    )
    return TrackerCommand(kind)


def _steer_command(psi_e: float, config: TrackerConfig) -> tuple[TrackerCommand, float]:
    correction = max(-config.delta_limit, min(config.delta_limit, config.k_p * psi_e))
    delta = config.delta0 + correction
    return TrackerCommand(CommandKind.SIDEWIND_WITH_STEERING, delta), delta


def _held_command(state: TrackerState, config: TrackerConfig) -> TrackerCommand:
    """Command equivalent to the one last issued, for stale-pose ticks."""
    if state.finished:
        return TrackerCommand(CommandKind.STOP)
    if state.mode in (Mode.TURN_FAR, Mode.TURN_NEAR) and state.turn_direction:
        return _turn_command(state.turn_direction)
    delta = state.last_delta if state.last_delta is not None else config.delta0
    return TrackerCommand(CommandKind.SIDEWIND_WITH_STEERING, delta)


def tick(
    state: TrackerState,
    pose: Pose2D,
    waypoints: Sequence[Waypoint],
    config: TrackerConfig,
    pose_stale: bool = False,
) -> tuple[TrackerState, TrackerCommand]:
    """One slow-loop decision. Pure: returns a new state and a command.

    A stale pose freezes the state machine and re-emits the previous
    command with the stale flag set; transitions resume on fresh data.
    """
    if not waypoints:
        raise ValueError("waypoint list must be non-empty")
    if pose_stale:
        return replace(state, stale=True), _held_command(state, config)
    state = replace(state, stale=False)

    if state.finished:
        return state, TrackerCommand(CommandKind.STOP)

    wp = waypoints[state.waypoint_index - 1]
    errors = compute_errors(pose, wp, config)
    state = replace(state, last_errors=errors)
    psi_e = errors.psi_e
    th_turn = config.yaw_threshold_turn
    th_wp = config.yaw_threshold_waypoint

    if errors.d_e > config.distance_threshold:
        if state.mode is Mode.SIDEWIND:
            if abs(psi_e) <= th_turn:
                cmd, delta = _steer_command(psi_e, config)
                return replace(state, last_delta=delta), cmd
            delta_raw = config.delta0 + config.k_p * psi_e  # pre-clamp trigger
            if psi_e > th_turn or delta_raw > config.turn_exit_delta:
                direction = _turn(config, positive_error=True)
            else:
                direction = _turn(config, positive_error=False)
            return state.begin_turn(Mode.TURN_FAR, direction), _turn_command(direction)
        if abs(psi_e) <= th_wp:
            state = replace(state, mode=Mode.SIDEWIND)
            cmd, delta = _steer_command(psi_e, config)
            return replace(state, last_delta=delta), cmd
        return state, _turn_command(state.turn_direction)

    if state.mode is Mode.SIDEWIND:
        if abs(psi_e) <= th_wp:
            k = state.waypoint_index + 1
            state = replace(state, waypoint_index=k, finished=k > len(waypoints))
            return state, TrackerCommand(CommandKind.WAYPOINT_REACHED)
        direction = _turn(config, positive_error=psi_e > 0)
        return state.begin_turn(Mode.TURN_NEAR, direction), _turn_command(direction)
    if abs(psi_e) <= th_wp:
        state = replace(state, mode=Mode.SIDEWIND)
        cmd, delta = _steer_command(psi_e, config)
        return replace(state, last_delta=delta), cmd
    return state, _turn_command(state.turn_direction)
