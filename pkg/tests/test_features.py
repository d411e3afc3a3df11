import math

import numpy as np
import pytest

from helpers import make_sequence, mirror_sequence, random_sequence, straight_posture_pose
from trampkit.errors import DegenerateGeometryError, FeatureError, ZeroSeparationError
from trampkit.features import (
    FEATURE_NAMES,
    FeatureTrajectory,
    extract_features,
    joint_angle,
    leg_angle,
    torso_angle,
    twist_trajectory,
    unwrap,
)
from trampkit.pose import Joint


def oracle_angle(a, b, c):
    ux, uy = a[0] - b[0], a[1] - b[1]
    vx, vy = c[0] - b[0], c[1] - b[1]
    nu = math.sqrt(ux * ux + uy * uy)
    nv = math.sqrt(vx * vx + vy * vy)
    cos = max(-1.0, min(1.0, (ux * vx + uy * vy) / (nu * nv)))
    return math.degrees(math.acos(cos))


# ---------------------------------------------------------------------------
# Scalar angle operations
# ---------------------------------------------------------------------------


def test_collinear_points_give_180():
    assert joint_angle((0, 0), (1, 0), (2, 0)) == pytest.approx(180.0)


def test_right_angle():
    assert joint_angle((0, 0), (0, 1), (1, 1)) == pytest.approx(90.0)


def test_joint_angle_matches_trig_oracle():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b, c = rng.uniform(-50, 50, size=(3, 2))
        if min(np.hypot(*(a - b)), np.hypot(*(c - b))) < 1e-3:
            continue
        assert joint_angle(a, b, c) == pytest.approx(oracle_angle(a, b, c), abs=1e-6)


def test_coincident_points_rejected():
    with pytest.raises(DegenerateGeometryError):
        joint_angle((1, 1), (1, 1), (2, 2))


def pose_with(pelvis, thorax, r_hip=(0, 0), r_ankle=(0, 1), l_hip=(5, 0), l_ankle=(5, 1)):
    pose = straight_posture_pose()
    pose[Joint.PELVIS, :2] = pelvis
    pose[Joint.THORAX, :2] = thorax
    pose[Joint.R_HIP, :2] = r_hip
    pose[Joint.R_ANKLE, :2] = r_ankle
    pose[Joint.L_HIP, :2] = l_hip
    pose[Joint.L_ANKLE, :2] = l_ankle
    return pose


def test_torso_angle_conventions():
    assert torso_angle(pose_with((0, 10), (0, 0))) == pytest.approx(0.0)  # thorax above
    assert abs(torso_angle(pose_with((0, 0), (0, 10)))) == pytest.approx(180.0)  # inverted
    assert torso_angle(pose_with((0, 0), (10, 0))) == pytest.approx(90.0)  # thorax to the right


def test_leg_angle_conventions():
    assert leg_angle(pose_with((0, 0), (0, -10), r_hip=(0, 0), r_ankle=(0, 20)), "right") == 0.0
    # ankle to the image-right of the hip: -90 under the shared sign sense
    assert leg_angle(pose_with((0, 0), (0, -10), r_hip=(0, 0), r_ankle=(20, 0)), "right") == pytest.approx(-90.0)


def test_leg_angle_matches_atan_oracle():
    rng = np.random.default_rng(1)
    for _ in range(100):
        hip = rng.uniform(-40, 40, 2)
        ankle = rng.uniform(-40, 40, 2)
        if np.hypot(*(ankle - hip)) < 1e-3:
            continue
        pose = pose_with((0, 0), (0, -10), r_hip=hip, r_ankle=ankle)
        v = ankle - hip
        expect = math.degrees(math.atan2(-v[0], v[1]))
        assert leg_angle(pose, "right") == pytest.approx(expect, abs=1e-9)


# ---------------------------------------------------------------------------
# Unwrapping
# ---------------------------------------------------------------------------


def test_unwrap_crossing():
    assert unwrap([170.0, -170.0]).tolist() == [170.0, 190.0]


def test_unwrap_small_steps_unchanged():
    series = np.array([0.0, 10.0, 25.0, 15.0, 40.0])
    assert np.array_equal(unwrap(series), series)


def test_unwrap_full_rotation_ramp():
    truth = np.linspace(15.0, 375.0, 20)
    wrapped = (truth + 180.0) % 360.0 - 180.0
    out = unwrap(wrapped)
    assert out[-1] == pytest.approx(out[0] + 360.0, abs=1e-9)
    assert np.allclose(out, truth, atol=1e-9)


def test_unwrap_preserves_value_mod_360():
    rng = np.random.default_rng(2)
    series = rng.uniform(-180, 180, 50)
    out = unwrap(series)
    assert np.allclose((out - series) % 360.0, 0.0, atol=1e-6)


def test_unwrap_empty_rejected():
    with pytest.raises(ValueError):
        unwrap([])


# ---------------------------------------------------------------------------
# Twist
# ---------------------------------------------------------------------------


def twist_fixture():
    """Three frames: max separation facing one way, zero, max the other way."""
    base = straight_posture_pose()
    joints = np.repeat(base[None], 3, axis=0)
    joints[0, Joint.R_SHOULDER, :2] = (120, 50)
    joints[0, Joint.L_SHOULDER, :2] = (80, 50)
    joints[1, Joint.R_SHOULDER, :2] = (100, 50)
    joints[1, Joint.L_SHOULDER, :2] = (100, 50)
    joints[2, Joint.R_SHOULDER, :2] = (80, 50)
    joints[2, Joint.L_SHOULDER, :2] = (120, 50)
    return make_sequence(joints)


def test_twist_anchor_values():
    twist = twist_trajectory(twist_fixture())
    assert twist[0] == pytest.approx(0.0)
    assert twist[1] == pytest.approx(90.0)
    assert twist[2] == pytest.approx(180.0)


def test_twist_uses_given_routine_maximum():
    seq = twist_fixture()
    twist = twist_trajectory(seq, sep_max=80.0)
    assert twist[0] == pytest.approx(math.degrees(math.acos(0.5)))


def test_twist_zero_separation_everywhere_raises():
    base = straight_posture_pose()
    base[Joint.R_SHOULDER, :2] = base[Joint.L_SHOULDER, :2]
    seq = make_sequence(np.repeat(base[None], 4, axis=0))
    with pytest.raises(ZeroSeparationError):
        twist_trajectory(seq)


def test_twist_invariant_to_frame_order():
    rng = np.random.default_rng(3)
    seq = random_sequence(rng, T=10)
    fwd = twist_trajectory(seq)
    rev = make_sequence(seq.joints[::-1].copy())
    assert np.allclose(twist_trajectory(rev), fwd[::-1], atol=1e-9)


# ---------------------------------------------------------------------------
# Full extraction
# ---------------------------------------------------------------------------


def test_straight_posture_gives_canonical_constants():
    pose = straight_posture_pose()
    seq = make_sequence(np.repeat(pose[None], 8, axis=0))
    traj = extract_features(seq)
    expect = [180, 180, 0, 0, 180, 180, 180, 180, 0, 0, 0, 0]
    for col, val in enumerate(expect):
        assert np.allclose(traj.angles[:, col], val, atol=1e-6), FEATURE_NAMES[col]


def test_rotating_body_unwraps_full_turn():
    pose = straight_posture_pose(origin=(0.0, 0.0))
    center = pose[Joint.PELVIS, :2].copy()
    T = 36
    frames = []
    for t in range(T):
        phi = np.radians(360.0 * t / (T - 1))
        rot = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
        p = pose.copy()
        p[:, :2] = (pose[:, :2] - center) @ rot.T + center
        frames.append(p)
    traj = extract_features(make_sequence(np.stack(frames)))
    torso = traj.angles[:, 10]
    assert abs(abs(torso[-1] - torso[0]) - 360.0) < 1e-6


def test_translation_and_scale_invariance():
    rng = np.random.default_rng(4)
    for _ in range(10):
        seq = random_sequence(rng, T=8)
        base = extract_features(seq).angles
        shifted = seq.joints.copy()
        shifted[:, :, :2] = shifted[:, :, :2] * 3.7 + np.array([123.0, -45.0])
        other = extract_features(make_sequence(shifted)).angles
        assert np.allclose(base, other, atol=1e-6)


def test_mirror_swaps_sides_and_negates_signed_angles():
    rng = np.random.default_rng(5)
    for _ in range(10):
        seq = random_sequence(rng, T=6)
        a = extract_features(seq).angles
        m = extract_features(mirror_sequence(seq)).angles
        for r_col, l_col in ((0, 1), (2, 3), (4, 5), (6, 7)):
            assert np.allclose(m[:, r_col], a[:, l_col], atol=1e-6)
            assert np.allclose(m[:, l_col], a[:, r_col], atol=1e-6)
        assert np.allclose(m[:, 8], -a[:, 9], atol=1e-6)
        assert np.allclose(m[:, 9], -a[:, 8], atol=1e-6)
        assert np.allclose(m[:, 10], -a[:, 10], atol=1e-6)
        assert np.allclose(m[:, 11], a[:, 11], atol=1e-6)


def test_interior_angles_bounded():
    rng = np.random.default_rng(6)
    seq = random_sequence(rng, T=20)
    traj = extract_features(seq)
    cols = traj.angles[:, :8]
    assert (cols >= 0.0).all() and (cols <= 180.0).all()


def test_missing_joints_interpolated():
    pose = straight_posture_pose()
    joints = np.repeat(pose[None], 10, axis=0)
    joints[4, Joint.R_KNEE, 0] += 500.0  # garbage position...
    joints[4, Joint.R_KNEE, 2] = 0.0  # ...flagged untrustworthy
    traj = extract_features(make_sequence(joints))
    assert traj.angles[4, 6] == pytest.approx(180.0, abs=1e-6)


def test_segment_too_short_raises():
    pose = straight_posture_pose()
    with pytest.raises(FeatureError):
        extract_features(make_sequence(pose[None]))


def test_all_joints_missing_raises():
    joints = np.repeat(straight_posture_pose()[None], 5, axis=0)
    joints[:, :, 2] = 0.0
    with pytest.raises(FeatureError):
        extract_features(make_sequence(joints))


def test_trajectory_json_round_trip(tmp_path):
    rng = np.random.default_rng(7)
    traj = FeatureTrajectory(angles=rng.uniform(0, 180, (9, 12)), fps=30.0, skill_ref="r1:3")
    path = tmp_path / "traj.json"
    traj.save(path)
    back = FeatureTrajectory.load(path)
    assert np.array_equal(back.angles, traj.angles)
    assert back.skill_ref == "r1:3"
