"""Coupled-oscillator joint trajectory generator.

One phase oscillator per joint, chained through nearest-neighbor coupling:

    theta_dot = mu * (A @ theta - B @ dphi) + omega
    r_ddot    = gamma^2 * (a_des - r) - 2 * gamma * r_dot

A is the negated second-difference operator of the open chain and
B = -D' for the difference operator D, so A @ theta == B @ dphi exactly
when consecutive phase differences equal the commanded profile; relative
phases then lock onto dphi from any start while each amplitude follows a
critically damped response toward its target (step response
a_des * (1 - exp(-gamma t) (1 + gamma t)), no overshoot).  Joint angles
are read out as q = r * sin(theta) + bias.

Integration is classical fixed-step RK4; everything here is deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

NUM_JOINTS = 11

AMPLITUDE_LIMIT_RAD = np.deg2rad(70.0)

BIAS_SLEW_TIME_S = 0.5  # bias changes ramp over this window instead of stepping


class IntegrationError(RuntimeError):
    """Oscillator state left the finite domain."""


def coupling_matrices(n: int = NUM_JOINTS) -> tuple[np.ndarray, np.ndarray]:
    """Phase coupling A (n x n) and offset map B (n x n-1) for an open chain."""
    diff = np.zeros((n - 1, n))
    idx = np.arange(n - 1)
    diff[idx, idx] = -1.0
    diff[idx, idx + 1] = 1.0
    return -diff.T @ diff, -diff.T


_A, _B = coupling_matrices()


@dataclass
class GaitParams:
    """Per-joint oscillator targets for one locomotion pattern."""

    name: str
    frequency: np.ndarray  # rad/s
    phase: np.ndarray  # rad, absolute profile; coupling uses its differences
    amplitude: np.ndarray  # rad, desired r
    bias: np.ndarray  # rad, static joint offset

    def __post_init__(self):
        for attr in ("frequency", "phase", "amplitude", "bias"):
            value = np.asarray(getattr(self, attr), dtype=float)
            if value.shape != (NUM_JOINTS,):
                raise ValueError(f"{attr} must have {NUM_JOINTS} entries")
            if not np.all(np.isfinite(value)):
                raise ValueError(f"{attr} has non-finite entries")
            setattr(self, attr, value)
        if np.any(self.amplitude < -1e-12) or np.any(self.amplitude > AMPLITUDE_LIMIT_RAD + 1e-9):
            raise ValueError("amplitudes must lie in [0, 70 deg]")

    @property
    def delta_phi(self) -> np.ndarray:
        return np.diff(self.phase)


@dataclass
class CpgConfig:
    mu: float = 10.0  # 1/s, phase coupling strength
    gamma: float = 20.0  # 1/s, amplitude pole location
    dt: float = 0.01  # s

    def __post_init__(self):
        if self.mu <= 0 or self.gamma <= 0:
            raise ValueError("mu and gamma must be positive")
        if not 0 < self.dt <= 0.01:
            raise ValueError("dt must lie in (0, 0.01]")


@dataclass
class CpgState:
    theta: np.ndarray
    r: np.ndarray
    r_dot: np.ndarray

    @classmethod
    def initial(cls, gait: GaitParams) -> "CpgState":
        """Start on the commanded phase profile with amplitudes at rest."""
        return cls(theta=gait.phase.copy(), r=np.zeros(NUM_JOINTS), r_dot=np.zeros(NUM_JOINTS))


def _rates(theta, r, r_dot, gait, cfg, dphi):
    theta_dot = cfg.mu * (_A @ theta - _B @ dphi) + gait.frequency
    r_ddot = cfg.gamma * cfg.gamma * (gait.amplitude - r) - 2.0 * cfg.gamma * r_dot
    return theta_dot, r_dot, r_ddot


def step(state: CpgState, gait: GaitParams, cfg: CpgConfig) -> CpgState:
    """One RK4 step of dt; raises IntegrationError on non-finite state."""
    for name, vec in (("theta", state.theta), ("r", state.r), ("r_dot", state.r_dot)):
        bad = np.flatnonzero(~np.isfinite(vec))
        if bad.size:
            raise IntegrationError(f"non-finite {name} at index {bad[0]}")
    dphi = gait.delta_phi
    h = cfg.dt
    k1 = _rates(state.theta, state.r, state.r_dot, gait, cfg, dphi)
    k2 = _rates(
        state.theta + 0.5 * h * k1[0],
        state.r + 0.5 * h * k1[1],
        state.r_dot + 0.5 * h * k1[2],
        gait, cfg, dphi,
    )
    k3 = _rates(
        state.theta + 0.5 * h * k2[0],
        state.r + 0.5 * h * k2[1],
        state.r_dot + 0.5 * h * k2[2],
        gait, cfg, dphi,
    )
    k4 = _rates(
        state.theta + h * k3[0], state.r + h * k3[1], state.r_dot + h * k3[2], gait, cfg, dphi
    )
    sixth = h / 6.0
    return CpgState(
        theta=state.theta + sixth * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
        r=state.r + sixth * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]),
        r_dot=state.r_dot + sixth * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2]),
    )


def joint_commands(state: CpgState, gait: GaitParams) -> np.ndarray:
    """Joint angle targets q = r * sin(theta) + bias."""
    return state.r * np.sin(state.theta) + gait.bias


class Cpg:
    """Oscillator network with retargeting; owns its state and active gait.

    Retargeting swaps parameter vectors while the oscillator state carries
    over, so the joint trajectory stays continuous.  Bias changes are slewed
    linearly over BIAS_SLEW_TIME_S rather than stepped.
    """

    def __init__(self, gait: GaitParams, cfg: CpgConfig):
        self.cfg = cfg
        self.gait = gait
        self.state = CpgState.initial(gait)
        self._bias = gait.bias.copy()
        self._bias_step = np.zeros(NUM_JOINTS)
        self._slew_ticks = 0

    def retarget(self, gait: GaitParams) -> None:
        if not np.array_equal(gait.bias, self._bias):
            ticks = max(1, round(BIAS_SLEW_TIME_S / self.cfg.dt))
            self._bias_step = (gait.bias - self._bias) / ticks
            self._slew_ticks = ticks
        else:
            self._bias_step[:] = 0.0
            self._slew_ticks = 0
        self.gait = gait

    def tick(self) -> np.ndarray:
        """Advance one dt and return the joint command vector."""
        self.state = step(self.state, self.gait, self.cfg)
        if self._slew_ticks:
            self._bias = self._bias + self._bias_step
            self._slew_ticks -= 1
            if self._slew_ticks == 0:
                self._bias = self.gait.bias.copy()  # land exactly on target
        return self.state.r * np.sin(self.state.theta) + self._bias
