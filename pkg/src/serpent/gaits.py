"""Gait presets: sidewinding and in-place turning.

Joint layout along the chain alternates pitch and yaw axes: odd-numbered
joints (array indices 0, 2, ...) pitch out of plane, even-numbered joints
(indices 1, 3, ...) yaw in plane.  Sidewinding runs a traveling wave on
each group with a quarter-period offset between them; turning uses the
same structure with reduced yaw amplitude and a mirrored yaw-wave
direction for left versus right.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cpg import NUM_JOINTS, GaitParams

PITCH_JOINTS = (0, 2, 4, 6, 8, 10)
YAW_JOINTS = (1, 3, 5, 7, 9)

DEFAULT_FREQUENCY_HZ = 1.0
SIDEWIND_PITCH_AMPLITUDE = np.deg2rad(15.0)
SIDEWIND_YAW_AMPLITUDE = np.deg2rad(45.0)
TURN_PITCH_AMPLITUDE = np.deg2rad(15.0)
TURN_YAW_AMPLITUDE = np.deg2rad(30.0)
DEFAULT_PHASE_STEP = np.deg2rad(60.0)  # spatial gradient within each wave
DEFAULT_WAVE_OFFSET = np.deg2rad(90.0)  # yaw wave leads pitch wave


def _phases(phase_step: float, wave_offset: float, yaw_step: float) -> np.ndarray:
    phi = np.zeros(NUM_JOINTS)
    for k, j in enumerate(PITCH_JOINTS):
        phi[j] = k * phase_step
    for k, j in enumerate(YAW_JOINTS):
        phi[j] = wave_offset + k * yaw_step
    return phi


def sidewinding_gait(
    frequency_hz: float = DEFAULT_FREQUENCY_HZ,
    pitch_amplitude: float = SIDEWIND_PITCH_AMPLITUDE,
    yaw_amplitude: float = SIDEWIND_YAW_AMPLITUDE,
    phase_step: float = DEFAULT_PHASE_STEP,
    wave_offset: float = DEFAULT_WAVE_OFFSET,
    bias: np.ndarray | None = None,
) -> GaitParams:
    amplitude = np.empty(NUM_JOINTS)
    amplitude[list(PITCH_JOINTS)] = pitch_amplitude
    amplitude[list(YAW_JOINTS)] = yaw_amplitude
    return GaitParams(
        name="sidewind",
        frequency=np.full(NUM_JOINTS, 2.0 * np.pi * frequency_hz),
        phase=_phases(phase_step, wave_offset, phase_step),
        amplitude=amplitude,
        bias=np.zeros(NUM_JOINTS) if bias is None else np.asarray(bias, dtype=float),
    )


def turn_in_place_gait(
    direction: str,
    frequency_hz: float = DEFAULT_FREQUENCY_HZ,
    pitch_amplitude: float = TURN_PITCH_AMPLITUDE,
    yaw_amplitude: float = TURN_YAW_AMPLITUDE,
    phase_step: float = DEFAULT_PHASE_STEP,
    wave_offset: float = DEFAULT_WAVE_OFFSET,
) -> GaitParams:
    if direction not in ("left", "right"):
        raise ValueError("direction must be 'left' or 'right'")
    yaw_step = phase_step if direction == "left" else -phase_step
    amplitude = np.empty(NUM_JOINTS)
    amplitude[list(PITCH_JOINTS)] = pitch_amplitude
    amplitude[list(YAW_JOINTS)] = yaw_amplitude
    return GaitParams(
        name=f"turn_{direction}",
        frequency=np.full(NUM_JOINTS, 2.0 * np.pi * frequency_hz),
        phase=_phases(phase_step, wave_offset, yaw_step),
        amplitude=amplitude,
        bias=np.zeros(NUM_JOINTS),
    )


@dataclass
class GaitSet:
    """The presets a mission controller switches between."""

    sidewind: GaitParams
    turn_left: GaitParams
    turn_right: GaitParams

    @classmethod
    def default(cls) -> "GaitSet":
        return cls(sidewinding_gait(), turn_in_place_gait("left"), turn_in_place_gait("right"))
