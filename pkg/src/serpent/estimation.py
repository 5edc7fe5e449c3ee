"""Pose-feedback conditioning: yaw smoothing and staleness fallback.

The heading estimate that drives steering comes from the virtual-chassis
yaw, which is noisy sample to sample and lives on a circle. YawFilter
keeps a short window of unwrapped samples and returns their re-wrapped
mean. StalenessMonitor watches the age of the last pose update and tells
the caller whether to trust it, warn, or fall back to an identity pose.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field

__all__ = [
    "ClockRegressionError",
    "PosePolicy",
    "StalenessMonitor",
    "StalenessState",
    "YawFilter",
    "staleness_check",
    "wrap_angle",
    "yaw_filter_push",
]

DEFAULT_WINDOW = 10
DEFAULT_TIMEOUT_S = 0.5


class ClockRegressionError(RuntimeError):
    """Raised when a timestamp moves backwards; feed a monotonic clock."""


def wrap_angle(angle: float) -> float:
    """Wrap to (-pi, pi]. Values already in range pass through unchanged,
    so the operation is exactly idempotent."""
    if -math.pi < angle <= math.pi:
        return angle
    wrapped = math.remainder(angle, math.tau)
    # remainder() lands in [-pi, pi]; fold the open end onto +pi
    return wrapped if wrapped > -math.pi else wrapped + math.tau


class YawFilter:
    """Moving average over unwrapped yaw samples.

    Each incoming sample is lifted onto the branch nearest the previous
    unwrapped sample (multiples of 2*pi), so a trajectory crossing +/-pi
    never tears the window. Partial windows average what they have; the
    controller needs an estimate from the first tick.
    """

    def __init__(self, window_size: int = DEFAULT_WINDOW):
        if window_size < 1:
            raise ValueError("window_size must be >= 1")
        self._window: deque[float] = deque(maxlen=window_size)
        self._last_unwrapped: float | None = None

    def push(self, yaw: float) -> float:
        if not math.isfinite(yaw):
            raise ValueError("yaw sample must be finite")
        if self._last_unwrapped is None:
            unwrapped = float(yaw)
        else:
            turns = round((self._last_unwrapped - yaw) / math.tau)
            unwrapped = yaw + math.tau * turns
        self._last_unwrapped = unwrapped
        self._window.append(unwrapped)
        return wrap_angle(math.fsum(self._window) / len(self._window))

    def reset(self) -> None:
        self._window.clear()
        self._last_unwrapped = None

    @property
    def window(self) -> tuple[float, ...]:
        """Unwrapped samples, oldest first. Exposed for checkpointing."""
        return tuple(self._window)

    @property
    def window_size(self) -> int:
        return self._window.maxlen

    def restore(self, samples: tuple[float, ...]) -> None:
        """Reload a window captured via the window property."""
        self.reset()
        for s in samples:
            self._window.append(float(s))
        if samples:
            self._last_unwrapped = float(samples[-1])


def yaw_filter_push(filter: YawFilter, yaw: float) -> tuple[YawFilter, float]:
    """Push one sample; returns the (mutated) filter and its output."""
    return filter, filter.push(yaw)


class StalenessState(enum.Enum):
    FRESH = "fresh"
    WARNING = "warning"
    FALLBACK = "fallback"


class PosePolicy(enum.Enum):
    USE_LATEST = "use_latest"
    WARN_USE_LATEST = "warn_use_latest"
    USE_IDENTITY = "use_identity"


_POLICY_FOR_STATE = {
    StalenessState.FRESH: PosePolicy.USE_LATEST,
    StalenessState.WARNING: PosePolicy.WARN_USE_LATEST,
    StalenessState.FALLBACK: PosePolicy.USE_IDENTITY,
}


@dataclass
class StalenessMonitor:
    """Tracks the age of the latest pose update.

    Fresh while age < timeout, Warning in [timeout, 2*timeout), Fallback
    at or beyond 2*timeout. Until the first pose arrives the monitor
    reports Fallback, so consumers start from the identity pose rather
    than garbage.
    """

    timeout: float = DEFAULT_TIMEOUT_S
    last_update_time: float | None = None
    state: StalenessState = field(default=StalenessState.FALLBACK)
    _last_now: float | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")

    def check(self, now: float, has_new_pose: bool) -> PosePolicy:
        if self._last_now is not None and now < self._last_now:
            raise ClockRegressionError(
                f"time went backwards: {now} < {self._last_now}"
            )
        self._last_now = now
        if has_new_pose:
            self.last_update_time = now
        if self.last_update_time is None:
            self.state = StalenessState.FALLBACK
        else:
            age = now - self.last_update_time
            if age < self.timeout:
                self.state = StalenessState.FRESH
            elif age < 2 * self.timeout:
                self.state = StalenessState.WARNING
            else:
                self.state = StalenessState.FALLBACK
        return _POLICY_FOR_STATE[self.state]


def staleness_check(
    mon: StalenessMonitor, now: float, has_new_pose: bool
) -> tuple[StalenessMonitor, PosePolicy]:
    """Advance the monitor; returns it with the pose policy to apply."""
    return mon, mon.check(now, has_new_pose)
