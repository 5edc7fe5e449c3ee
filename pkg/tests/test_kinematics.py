"""Kinematics tests against an independent 4x4 homogeneous-matrix oracle."""

import math

import numpy as np
import pytest

from serpent.kinematics import (
    DegenerateHeadingError,
    InvalidStateError,
    KinematicConstants,
    LinkPoses,
    RigidTransform,
    RobotState,
    bounding_box,
    center_of_mass,
    forward_kinematics,
    reduce_state,
    virtual_chassis,
)

HEAD_LEN = 0.1565
LINK_LEN = 0.1230


# --- independent oracle: naive 4x4 chain, trig-built rotations ---

def _rx4(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0, 0], [0, c, -s, 0], [0, s, c, 0], [0, 0, 0, 1.0]])


def _rz4(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0, 0], [s, c, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1.0]])


def _trans4(x, y, z):
    t = np.eye(4)
    t[:3, 3] = (x, y, z)
    return t


def _quat4(q, position):
    x, y, z, w = q
    t = np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w), 0],
            [2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w), 0],
            [2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y), 0],
            [0, 0, 0, 1.0],
        ]
    )
    t[:3, 3] = position
    return t


def fk_oracle(position, quat, joints, first_joint_positive=False):
    """Frame positions via plain 4x4 products, kept independent of the library."""
    t = _quat4(quat, position)
    frames = [t]
    t = t @ _trans4(-HEAD_LEN, 0, 0) @ _rx4(math.pi / 2)
    frames.append(t)
    sign = 1.0 if first_joint_positive else -1.0
    for qi in joints:
        t = t @ _rz4(-qi) @ _trans4(-LINK_LEN, 0, 0) @ _rx4(sign * math.pi / 2)
        frames.append(t)
        sign = -sign
    return np.column_stack([f[:3, 3] for f in frames]), [f[:3, :3] for f in frames]


def random_state(rng):
    quat = rng.normal(size=4)
    quat /= np.linalg.norm(quat)
    return RobotState(
        base_position=rng.uniform(-1.0, 1.0, size=3),
        base_orientation=quat,
        joint_angles=rng.uniform(-np.deg2rad(70), np.deg2rad(70), size=11),
    )


def test_fk_matches_4x4_oracle_seeded():
    rng = np.random.default_rng(20260816)
    k = KinematicConstants()
    for _ in range(100):
        state = random_state(rng)
        poses = forward_kinematics(state, k)
        expected, _ = fk_oracle(state.base_position, state.base_orientation, state.joint_angles)
        np.testing.assert_allclose(poses.positions, expected, atol=1e-9, rtol=0)


def test_fk_zero_pose_collinear_spacing():
    state = RobotState(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]), np.zeros(11))
    poses = forward_kinematics(state, KinematicConstants())
    # straight chain along -x: head at H, then L per joint, exact values
    xs = poses.positions[0]
    assert xs[0] == 0.0
    assert xs[1] == -HEAD_LEN
    np.testing.assert_allclose(np.diff(xs[1:]), -LINK_LEN, atol=1e-15, rtol=0)
    np.testing.assert_allclose(poses.positions[1:], 0.0, atol=1e-15)


def test_fk_link_spacing_constant():
    rng = np.random.default_rng(7)
    k = KinematicConstants()
    for _ in range(50):
        poses = forward_kinematics(random_state(rng), k)
        gaps = np.linalg.norm(np.diff(poses.positions, axis=1), axis=0)
        np.testing.assert_allclose(gaps[0], HEAD_LEN, atol=1e-9)
        np.testing.assert_allclose(gaps[1:], LINK_LEN, atol=1e-9)


def test_fk_base_translation_equivariance():
    rng = np.random.default_rng(11)
    k = KinematicConstants()
    for _ in range(25):
        state = random_state(rng)
        shift = rng.uniform(-2, 2, size=3)
        shifted = RobotState(state.base_position + shift, state.base_orientation, state.joint_angles)
        a = forward_kinematics(state, k).positions
        b = forward_kinematics(shifted, k).positions
        np.testing.assert_allclose(b, a + shift[:, None], atol=1e-9)


def test_fk_parity_flag_mirrors_roll_sign():
    rng = np.random.default_rng(13)
    state = random_state(rng)
    flipped = KinematicConstants(first_joint_roll_positive=True)
    poses = forward_kinematics(state, flipped)
    expected, _ = fk_oracle(
        state.base_position, state.base_orientation, state.joint_angles, first_joint_positive=True
    )
    np.testing.assert_allclose(poses.positions, expected, atol=1e-9)


def test_robot_state_normalizes_near_unit_quaternion():
    q = np.array([0.0, 0.0, 0.0, 1.0 + 5e-4])
    state = RobotState(np.zeros(3), q, np.zeros(11))
    assert abs(np.linalg.norm(state.base_orientation) - 1.0) < 1e-12


def test_robot_state_rejects_bad_inputs():
    with pytest.raises(InvalidStateError):
        RobotState(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.1]), np.zeros(11))
    with pytest.raises(InvalidStateError):
        RobotState(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]), np.full(11, np.nan))
    with pytest.raises(InvalidStateError):
        RobotState(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]), np.full(11, np.deg2rad(80)))


def test_robot_state_from_euler_round_trip():
    state = RobotState.from_euler(np.zeros(3), np.array([0.1, -0.2, 0.3]), np.zeros(11))
    assert abs(np.linalg.norm(state.base_orientation) - 1.0) < 1e-12
    # yaw-only euler maps to a yaw-only quaternion
    yaw_only = RobotState.from_euler(np.zeros(3), np.array([0.0, 0.0, np.pi / 2]), np.zeros(11))
    r = forward_kinematics(yaw_only, KinematicConstants()).transforms[0].rotation
    np.testing.assert_allclose(r @ np.array([1.0, 0, 0]), [0, 1, 0], atol=1e-12)


# --- virtual chassis / reduced state ---

def test_virtual_chassis_straight_chain_heading():
    state = RobotState(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]), np.zeros(11))
    poses = forward_kinematics(state, KinematicConstants())
    x_hat, r_com = virtual_chassis(poses)
    np.testing.assert_allclose(x_hat, [1, 0, 0], atol=1e-12)
    np.testing.assert_allclose(r_com, np.eye(3), atol=1e-12)


def test_virtual_chassis_yaw_equivariance():
    rng = np.random.default_rng(29)
    k = KinematicConstants()
    for _ in range(25):
        state = random_state(rng)
        poses = forward_kinematics(state, k)
        try:
            _, r0 = virtual_chassis(poses)
        except DegenerateHeadingError:
            continue
        yaw0 = math.atan2(r0[1, 0], r0[0, 0])
        ang = rng.uniform(-np.pi, np.pi)
        c, s = math.cos(ang), math.sin(ang)
        rz = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])
        rotated = LinkPoses(
            [RigidTransform(rz @ t.rotation, rz @ t.translation) for t in poses.transforms]
        )
        _, r1 = virtual_chassis(rotated)
        yaw1 = math.atan2(r1[1, 0], r1[0, 0])
        diff = math.atan2(math.sin(yaw1 - yaw0 - ang), math.cos(yaw1 - yaw0 - ang))
        assert abs(diff) < 1e-9


def test_virtual_chassis_degenerate_vertical():
    # base pitched so every link forward axis is vertical
    state = RobotState.from_euler(np.zeros(3), np.array([0.0, -np.pi / 2, 0.0]), np.zeros(11))
    poses = forward_kinematics(state, KinematicConstants())
    with pytest.raises(DegenerateHeadingError):
        virtual_chassis(poses)
    reduced = reduce_state(poses, KinematicConstants(), fallback_yaw=0.25)
    assert reduced.yaw == 0.25


def test_virtual_chassis_z_column_is_world_up():
    rng = np.random.default_rng(31)
    for _ in range(10):
        poses = forward_kinematics(random_state(rng), KinematicConstants())
        try:
            _, r_com = virtual_chassis(poses)
        except DegenerateHeadingError:
            continue
        np.testing.assert_allclose(r_com[:, 2], [0, 0, 1], atol=0)
        np.testing.assert_allclose(r_com.T @ r_com, np.eye(3), atol=1e-12)


# --- center of mass ---

def test_center_of_mass_weighted_sum_oracle():
    rng = np.random.default_rng(37)
    k = KinematicConstants()
    masses = np.array([0.25, 0.25] + [0.50] * 11)
    for _ in range(20):
        poses = forward_kinematics(random_state(rng), k)
        expected = np.zeros(3)
        for i in range(13):
            expected += masses[i] * poses.positions[:, i]
        expected /= masses.sum()
        np.testing.assert_allclose(center_of_mass(poses, k), expected, atol=1e-12)


def test_center_of_mass_equal_masses_is_mean():
    k = KinematicConstants(link_masses=np.full(13, 0.4))
    poses = forward_kinematics(random_state(np.random.default_rng(41)), k)
    np.testing.assert_allclose(center_of_mass(poses, k), poses.positions.mean(axis=1), atol=1e-12)


def test_mass_vector_default_values():
    k = KinematicConstants()
    assert k.link_masses[0] == 0.25 and k.link_masses[1] == 0.25
    np.testing.assert_allclose(k.link_masses[2:], 0.50)
    assert k.link_masses.shape == (13,)
    with pytest.raises(InvalidStateError):
        KinematicConstants(link_masses=np.full(13, -1.0))


# --- bounding box ---

def test_bounding_box_straight_chain():
    state = RobotState(np.zeros(3), np.array([0.0, 0.0, 0.0, 1.0]), np.zeros(11))
    k = KinematicConstants()
    poses = forward_kinematics(state, k)
    com = center_of_mass(poses, k)
    _, r_com = virtual_chassis(poses)
    span = bounding_box(poses, com, r_com)
    chain = HEAD_LEN + 11 * LINK_LEN
    np.testing.assert_allclose(span, [chain + 0.1, 0.1, 0.1], atol=1e-12)


def test_bounding_box_padding_floor():
    rng = np.random.default_rng(43)
    k = KinematicConstants()
    for _ in range(10):
        poses = forward_kinematics(random_state(rng), k)
        com = center_of_mass(poses, k)
        try:
            _, r_com = virtual_chassis(poses)
        except DegenerateHeadingError:
            continue
        assert np.all(bounding_box(poses, com, r_com) >= 0.1 - 1e-15)


def test_bounding_box_rigid_motion_invariance():
    rng = np.random.default_rng(47)
    k = KinematicConstants()
    state = random_state(rng)
    poses = forward_kinematics(state, k)
    com = center_of_mass(poses, k)
    _, r_com = virtual_chassis(poses)
    span = bounding_box(poses, com, r_com)
    ang = 1.1
    c, s = math.cos(ang), math.sin(ang)
    rz = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1.0]])
    shift = np.array([0.3, -0.7, 0.2])
    moved = LinkPoses(
        [RigidTransform(rz @ t.rotation, rz @ t.translation + shift) for t in poses.transforms]
    )
    com2 = center_of_mass(moved, k)
    _, r_com2 = virtual_chassis(moved)
    np.testing.assert_allclose(bounding_box(moved, com2, r_com2), span, atol=1e-9)


def test_reduce_state_fields_consistent():
    rng = np.random.default_rng(53)
    k = KinematicConstants()
    poses = forward_kinematics(random_state(rng), k)
    reduced = reduce_state(poses, k)
    np.testing.assert_allclose(reduced.com_position, center_of_mass(poses, k), atol=1e-12)
    assert reduced.yaw == pytest.approx(
        math.atan2(reduced.vc_rotation[1, 0], reduced.vc_rotation[0, 0])
    )
    assert np.all(reduced.bbox_span >= 0.1 - 1e-15)


# --- rigid transform algebra ---

def test_rigid_transform_compose_inverse():
    rng = np.random.default_rng(59)
    state = random_state(rng)
    poses = forward_kinematics(state, KinematicConstants())
    t = poses.transforms[5]
    ident = t @ t.inverse()
    np.testing.assert_allclose(ident.rotation, np.eye(3), atol=1e-12)
    np.testing.assert_allclose(ident.translation, 0.0, atol=1e-12)
    p = rng.uniform(-1, 1, 3)
    np.testing.assert_allclose(
        (poses.transforms[2] @ poses.transforms[3]).apply(p),
        poses.transforms[2].apply(poses.transforms[3].apply(p)),
        atol=1e-12,
    )
