"""Steering by amplitude modulation of the horizontal wave.

A scalar steering command tilts the yaw-joint amplitude profile along the
body: positive commands grow the head-side amplitudes and shrink the
tail-side ones, which skews the ground contact pattern and turns the gait.
A uniform offset term shifts all yaw amplitudes together.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaits import YAW_JOINTS

__all__ = [
    "ConfigError",
    "SteeringConfig",
    "modify_amplitudes",
    "clamp_steering",
    "turning_rate",
    "bias_from_drift",
]


class ConfigError(ValueError):
    """Raised for steering parameters outside their valid domain."""


def _default_alpha() -> np.ndarray:
    return np.array([2.0, 1.0, 0.0, -1.0, -2.0])


@dataclass(frozen=True)
class SteeringConfig:
    """Tuning knobs for the amplitude-modulation steering law.

    alpha: per-yaw-joint weights, head to tail. Zero-sum so pure steering
        leaves the mean amplitude (and hence stride) unchanged.
    delta_limit: symmetric clamp on the steering command itself.
    amplitude_min/max: optional postural band used instead of the hard
        joint limit when use_amplitude_bounds is set.
    k_turn, postural_length: map a steering command to an expected yaw
        rate, omega = k_turn * delta / postural_length.
    k_bias: gain of the drift-cancelling offset, seconds.
    """

    alpha: np.ndarray = field(default_factory=_default_alpha)
    delta_offset: float = 0.0
    delta_limit: float = np.deg2rad(7.0)
    amplitude_min: float = np.deg2rad(5.0)
    amplitude_max: float = np.deg2rad(50.0)
    amplitude_limit: float = np.deg2rad(70.0)
    use_amplitude_bounds: bool = False
    k_turn: float = 0.3
    postural_length: float = 0.5
    k_bias: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.asarray(self.alpha, dtype=float))
        if self.alpha.shape != (len(YAW_JOINTS),):
            raise ConfigError(f"alpha must have {len(YAW_JOINTS)} entries")
        if self.delta_limit <= 0:
            raise ConfigError("delta_limit must be positive")
        if not 0 <= self.amplitude_min < self.amplitude_max:
            raise ConfigError("need 0 <= amplitude_min < amplitude_max")


def modify_amplitudes(nominal: np.ndarray, delta: float, config: SteeringConfig) -> np.ndarray:
    """Apply the steering gradient to the yaw entries of an amplitude vector.

    Returns a new 11-vector; pitch entries pass through untouched. Yaw
    entries are clamped after modulation, so feeding the result back with
    delta = 0 is a no-op.
    """
    amps = np.array(nominal, dtype=float)
    yaw = list(YAW_JOINTS)
    modulated = amps[yaw] + config.alpha * delta + config.delta_offset
    if config.use_amplitude_bounds:
        lo, hi = config.amplitude_min, config.amplitude_max
    else:
        lo, hi = -config.amplitude_limit, config.amplitude_limit
    amps[yaw] = np.clip(modulated, lo, hi)
    return amps


def clamp_steering(delta: float, config: SteeringConfig) -> float:
    """Saturate a steering command at +/- delta_limit."""
    return float(np.clip(delta, -config.delta_limit, config.delta_limit))


def turning_rate(delta: float, config: SteeringConfig) -> float:
    """Expected heading rate (rad/s) produced by a steering command."""
    if config.postural_length <= 0:
        raise ConfigError("postural_length must be positive")
    return config.k_turn * delta / config.postural_length


def bias_from_drift(drift_rate: float, config: SteeringConfig) -> float:
    """Amplitude offset that cancels a measured open-loop heading drift."""
    return -config.k_bias * drift_rate
