"""World-frame link poses of the snake and their reduced-order summary.

The robot is a serial chain of 13 frames (base, head, ten body links, tail)
connected by 11 actuated joints in an alternating pitch/yaw layout.  Frame
i+1 follows frame i through Rz(-q_i) * Trans(-L, 0, 0) * Rx(+-90deg), with
the roll sign alternating along the chain; the head hangs off the base
through Trans(-H, 0, 0) * Rx(+90deg).

The reduced summary consumed by the navigation stack is a horizontal body
frame built from the mean link forward axis (the "virtual chassis"), the
mass-weighted center of mass, and a padded axis-aligned bounding box
expressed in that frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NUM_FRAMES = 13
NUM_JOINTS = 11

HEAD_LENGTH_M = 0.1565
LINK_LENGTH_M = 0.1230
BBOX_PADDING_M = 0.1

JOINT_LIMIT_RAD = np.deg2rad(70.0)

WORLD_UP = np.array([0.0, 0.0, 1.0])

# rolls between consecutive links, exact entries (cos/sin of +-90deg)
_RX_POS = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])
_RX_NEG = _RX_POS.T


class InvalidStateError(ValueError):
    """A robot state or constant set failed its validity checks."""


class DegenerateHeadingError(RuntimeError):
    """The mean link forward axis has no horizontal component.

    Carries the fallback yaw the caller decided to hold, when it had one.
    """

    def __init__(self, message: str, fallback_yaw: float | None = None):
        super().__init__(message)
        self.fallback_yaw = fallback_yaw


@dataclass
class RigidTransform:
    """Rotation plus translation; composes like a homogeneous matrix."""

    rotation: np.ndarray
    translation: np.ndarray

    @staticmethod
    def identity() -> "RigidTransform":
        return RigidTransform(np.eye(3), np.zeros(3))

    def __matmul__(self, other: "RigidTransform") -> "RigidTransform":
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)

    def apply(self, point: np.ndarray) -> np.ndarray:
        return self.rotation @ np.asarray(point, dtype=float) + self.translation


def quaternion_to_rotation(q: np.ndarray) -> np.ndarray:
    """Rotation matrix from a unit quaternion in [x, y, z, w] order."""
    x, y, z, w = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)],
        ]
    )


def rotation_to_quaternion(r: np.ndarray) -> np.ndarray:
    """Unit quaternion [x, y, z, w] from a rotation matrix (Shepperd's method)."""
    tr = r[0, 0] + r[1, 1] + r[2, 2]
    if tr > 0:
        s = math.sqrt(tr + 1.0) * 2
        return np.array(
            [(r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s, 0.25 * s]
        )
    i = int(np.argmax([r[0, 0], r[1, 1], r[2, 2]]))
    j, k = (i + 1) % 3, (i + 2) % 3
    s = math.sqrt(max(r[i, i] - r[j, j] - r[k, k] + 1.0, 0.0)) * 2
    q = np.empty(4)
    q[i] = 0.25 * s
    q[j] = (r[j, i] + r[i, j]) / s
    q[k] = (r[k, i] + r[i, k]) / s
    q[3] = (r[k, j] - r[j, k]) / s
    return q


def _default_masses() -> np.ndarray:
    # base, head light; ten body links and tail at 0.50 kg each
    return np.array([0.25, 0.25] + [0.50] * 11)


@dataclass
class KinematicConstants:
    head_length: float = HEAD_LENGTH_M
    link_length: float = LINK_LENGTH_M
    link_masses: np.ndarray = field(default_factory=_default_masses)
    # roll sign of the first actuated joint; head roll is always +90deg
    first_joint_roll_positive: bool = False

    def __post_init__(self):
        self.link_masses = np.asarray(self.link_masses, dtype=float)
        if self.link_masses.shape != (NUM_FRAMES,):
            raise InvalidStateError(f"expected {NUM_FRAMES} link masses")
        if not np.all(self.link_masses > 0):
            raise InvalidStateError("link masses must be positive")
        if self.head_length <= 0 or self.link_length <= 0:
            raise InvalidStateError("segment lengths must be positive")


@dataclass
class RobotState:
    """Base pose plus joint vector; quaternion is normalized on ingest."""

    base_position: np.ndarray
    base_orientation: np.ndarray  # [x, y, z, w]
    joint_angles: np.ndarray

    def __post_init__(self):
        self.base_position = np.asarray(self.base_position, dtype=float)
        self.base_orientation = np.asarray(self.base_orientation, dtype=float)
        self.joint_angles = np.asarray(self.joint_angles, dtype=float)
        if self.base_position.shape != (3,) or self.base_orientation.shape != (4,):
            raise InvalidStateError("base pose has wrong shape")
        if self.joint_angles.shape != (NUM_JOINTS,):
            raise InvalidStateError(f"expected {NUM_JOINTS} joint angles")
        if not (np.all(np.isfinite(self.base_position)) and np.all(np.isfinite(self.joint_angles))):
            raise InvalidStateError("non-finite entries in state")
        norm = np.linalg.norm(self.base_orientation)
        if not np.isfinite(norm) or abs(norm - 1.0) > 1e-3:
            raise InvalidStateError(f"quaternion norm {norm} too far from 1")
        self.base_orientation = self.base_orientation / norm
        if np.any(np.abs(self.joint_angles) > JOINT_LIMIT_RAD + 1e-9):
            raise InvalidStateError("joint angle beyond the 70 deg hardware clamp")

    @classmethod
    def from_euler(
        cls, position: np.ndarray, rpy: np.ndarray, joint_angles: np.ndarray
    ) -> "RobotState":
        """Build from intrinsic XYZ Euler angles (roll, pitch, yaw)."""
        a, b, c = rpy
        ca, sa = math.cos(a), math.sin(a)
        cb, sb = math.cos(b), math.sin(b)
        cc, sc = math.cos(c), math.sin(c)
        rx = np.array([[1, 0, 0], [0, ca, -sa], [0, sa, ca]])
        ry = np.array([[cb, 0, sb], [0, 1, 0], [-sb, 0, cb]])
        rz = np.array([[cc, -sc, 0], [sc, cc, 0], [0, 0, 1]])
        return cls(position, rotation_to_quaternion(rx @ ry @ rz), joint_angles)


@dataclass
class LinkPoses:
    """World transforms of all chain frames, base first."""

    transforms: list[RigidTransform]
    positions: np.ndarray = None  # 3 x NUM_FRAMES, derived when omitted

    def __post_init__(self):
        if self.positions is None:
            self.positions = np.column_stack([t.translation for t in self.transforms])


@dataclass
class ReducedState:
    com_position: np.ndarray
    vc_rotation: np.ndarray
    yaw: float
    bbox_span: np.ndarray


def _rotz(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def forward_kinematics(state: RobotState, constants: KinematicConstants) -> LinkPoses:
    """World pose of every chain frame for the given state."""
    head_offset = np.array([-constants.head_length, 0.0, 0.0])
    link_offset = np.array([-constants.link_length, 0.0, 0.0])

    base = RigidTransform(quaternion_to_rotation(state.base_orientation), state.base_position)
    transforms = [base]
    cur = RigidTransform(base.rotation @ _RX_POS, base.rotation @ head_offset + base.translation)
    transforms.append(cur)

    roll = _RX_POS if constants.first_joint_roll_positive else _RX_NEG
    for q in state.joint_angles:
        turned = cur.rotation @ _rotz(-q)
        cur = RigidTransform(turned @ roll, turned @ link_offset + cur.translation)
        transforms.append(cur)
        roll = _RX_NEG if roll is _RX_POS else _RX_POS
    return LinkPoses(transforms)


def virtual_chassis(poses: LinkPoses) -> tuple[np.ndarray, np.ndarray]:
    """Horizontal body frame from the mean link forward axis.

    Averages the world x-axis of every frame, projects out the vertical
    component, and completes a right-handed frame with world up as the
    third column.  Raises DegenerateHeadingError when the projection is
    shorter than 1e-8 (chain pointing straight up or down).
    """
    x_bar = np.mean([t.rotation[:, 0] for t in poses.transforms], axis=0)
    horizontal = x_bar - (x_bar @ WORLD_UP) * WORLD_UP
    norm = np.linalg.norm(horizontal)
    if norm <= 1e-8:
        raise DegenerateHeadingError("mean forward axis has no horizontal component")
    x_hat = horizontal / norm
    y_hat = np.cross(WORLD_UP, x_hat)
    return x_hat, np.column_stack([x_hat, y_hat, WORLD_UP])


def center_of_mass(poses: LinkPoses, constants: KinematicConstants) -> np.ndarray:
    m = constants.link_masses
    return poses.positions @ m / m.sum()


def bounding_box(poses: LinkPoses, com: np.ndarray, vc_rotation: np.ndarray) -> np.ndarray:
    """Padded per-axis extent of the chain in the virtual-chassis frame."""
    body = vc_rotation.T @ (poses.positions - com[:, None])
    return body.max(axis=1) - body.min(axis=1) + BBOX_PADDING_M


def reduce_state(
    poses: LinkPoses, constants: KinematicConstants, fallback_yaw: float | None = None
) -> ReducedState:
    """CoM pose summary; holds fallback_yaw through degenerate headings."""
    com = center_of_mass(poses, constants)
    try:
        _, vc = virtual_chassis(poses)
        yaw = math.atan2(vc[1, 0], vc[0, 0])
    except DegenerateHeadingError:
        if fallback_yaw is None:
            raise
        yaw = fallback_yaw
        vc = _rotz(yaw)
    return ReducedState(com, vc, yaw, bounding_box(poses, com, vc))
