import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import make_sequence, random_sequence, straight_posture_pose
from trampkit.errors import PoseFormatError
from trampkit.pose import (
    N_JOINTS,
    PoseSequence,
    load_pose_sequence,
    save_pose_sequence,
    smooth_poses,
    to_crop_coordinates,
    to_full_frame,
)


# ---------------------------------------------------------------------------
# Wire format
# ---------------------------------------------------------------------------


def test_round_trip_bit_exact(tmp_path):
    rng = np.random.default_rng(0)
    seq = random_sequence(rng, T=9)
    seq.joints[:, :, 2] = rng.random((9, N_JOINTS))
    path = tmp_path / "poses.jsonl"
    save_pose_sequence(seq, path)
    back = load_pose_sequence(path)
    assert np.array_equal(back.joints, seq.joints)
    assert np.array_equal(back.frame_indices, seq.frame_indices)
    assert back.fps == seq.fps
    assert back.coords == seq.coords


def test_rewrite_is_byte_identical(tmp_path):
    rng = np.random.default_rng(1)
    seq = random_sequence(rng, T=5)
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    save_pose_sequence(seq, p1)
    save_pose_sequence(load_pose_sequence(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_two_line_file_without_header(tmp_path):
    joint = [1.0, 2.0, 0.9]
    path = tmp_path / "p.jsonl"
    lines = [json.dumps({"frame": i, "joints": [joint] * 16}) for i in (3, 7)]
    path.write_text("\n".join(lines) + "\n")
    seq = load_pose_sequence(path)
    assert len(seq) == 2
    assert seq.frame_indices.tolist() == [3, 7]
    assert seq.fps == 30.0  # default when no header


def test_wrong_joint_count_reports_line(tmp_path):
    path = tmp_path / "p.jsonl"
    good = json.dumps({"frame": 0, "joints": [[0, 0, 1]] * 16})
    bad = json.dumps({"frame": 1, "joints": [[0, 0, 1]] * 15})
    path.write_text(good + "\n" + bad + "\n")
    with pytest.raises(PoseFormatError) as exc:
        load_pose_sequence(path)
    assert exc.value.line_number == 2
    assert "15" in str(exc.value)


def test_non_monotone_frames_rejected(tmp_path):
    path = tmp_path / "p.jsonl"
    line = json.dumps({"frame": 5, "joints": [[0, 0, 1]] * 16})
    path.write_text(line + "\n" + line + "\n")
    with pytest.raises(PoseFormatError) as exc:
        load_pose_sequence(path)
    assert "5" in str(exc.value)


def test_nan_coordinates_rejected(tmp_path):
    path = tmp_path / "p.jsonl"
    joints = [[0.0, 0.0, 1.0]] * 15 + [[float("nan"), 0.0, 1.0]]
    path.write_text(json.dumps({"frame": 0, "joints": joints}) + "\n")
    with pytest.raises(PoseFormatError):
        load_pose_sequence(path)


def test_confidence_out_of_range_rejected(tmp_path):
    path = tmp_path / "p.jsonl"
    joints = [[0.0, 0.0, 1.0]] * 15 + [[1.0, 1.0, 1.5]]
    path.write_text(json.dumps({"frame": 0, "joints": joints}) + "\n")
    with pytest.raises(PoseFormatError):
        load_pose_sequence(path)


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "p.jsonl"
    path.write_text('{"frame": 0, "joints": [[0,0,1]' + "\n")
    with pytest.raises(PoseFormatError) as exc:
        load_pose_sequence(path)
    assert exc.value.line_number == 1


def test_crop_stream_with_origins_round_trips(tmp_path):
    rng = np.random.default_rng(2)
    base = random_sequence(rng, T=4)
    origins = np.asarray(rng.integers(0, 200, size=(4, 2)), dtype=np.float64)
    seq = to_crop_coordinates(base, origins)
    path = tmp_path / "crop.jsonl"
    save_pose_sequence(seq, path)
    back = load_pose_sequence(path)
    assert back.coords == "crop"
    assert np.array_equal(back.origins, origins)
    assert np.array_equal(back.joints, seq.joints)


# ---------------------------------------------------------------------------
# Sequence validation
# ---------------------------------------------------------------------------


def test_sequence_rejects_bad_shapes():
    with pytest.raises(ValueError):
        PoseSequence(frame_indices=np.arange(2), joints=np.zeros((2, 15, 3)))
    with pytest.raises(ValueError):
        PoseSequence(frame_indices=np.array([2, 1]), joints=np.zeros((2, 16, 3)))


# ---------------------------------------------------------------------------
# Smoothing
# ---------------------------------------------------------------------------


def test_window_one_is_identity():
    rng = np.random.default_rng(3)
    seq = random_sequence(rng, T=10)
    out = smooth_poses(seq, window=1)
    assert np.array_equal(out.joints, seq.joints)


def test_even_window_rejected():
    rng = np.random.default_rng(4)
    with pytest.raises(ValueError):
        smooth_poses(random_sequence(rng, T=5), window=4)


def test_constant_pose_unchanged():
    pose = straight_posture_pose()
    seq = make_sequence(np.repeat(pose[None], 30, axis=0))
    out = smooth_poses(seq, window=7)
    assert np.allclose(out.joints[:, :, :2], seq.joints[:, :, :2], atol=1e-9)


def test_impulse_noise_suppressed_by_confidence_gate():
    pose = straight_posture_pose()
    T = 31
    joints = np.repeat(pose[None], T, axis=0)
    joints[:, :, 0] += np.linspace(0, 30, T)[:, None]  # slow drift
    clean_x = joints[15, 4, 0]
    joints[15, 4, 0] += 50.0  # one knee jumps 50 px for one frame
    joints[15, 4, 2] = 0.05  # the estimator knows it is unsure
    seq = make_sequence(joints)
    out = smooth_poses(seq, window=5, conf_floor=0.2)
    assert abs(out.joints[15, 4, 0] - clean_x) < 2.0


def test_smoothing_preserves_length_and_indices():
    rng = np.random.default_rng(5)
    seq = random_sequence(rng, T=14)
    out = smooth_poses(seq, window=5)
    assert len(out) == len(seq)
    assert np.array_equal(out.frame_indices, seq.frame_indices)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 1000))
def test_smoothed_values_inside_window_envelope(seed):
    rng = np.random.default_rng(seed)
    seq = random_sequence(rng, T=16)
    window = 5
    out = smooth_poses(seq, window=window, conf_floor=0.0)
    half = window // 2
    for t in range(len(seq)):
        lo = max(0, t - half)
        hi = min(len(seq), t + half + 1)
        w_xy = seq.joints[lo:hi, :, :2]
        assert (out.joints[t, :, :2] >= w_xy.min(axis=0) - 1e-9).all()
        assert (out.joints[t, :, :2] <= w_xy.max(axis=0) + 1e-9).all()


# ---------------------------------------------------------------------------
# Coordinate frames
# ---------------------------------------------------------------------------


def test_crop_translation_example():
    joints = np.zeros((1, 16, 3))
    joints[0, :, 0] = 10.0
    joints[0, :, 1] = 10.0
    joints[0, :, 2] = 1.0
    seq = make_sequence(joints, coords="crop", origins=np.array([[100.0, 50.0]]))
    full = to_full_frame(seq)
    assert full.joints[0, 0, 0] == 110.0
    assert full.joints[0, 0, 1] == 60.0


def test_round_trip_identity_on_pixel_grid():
    # quarter-pixel coordinates with integral origins round-trip bitwise
    rng = np.random.default_rng(6)
    xy = rng.integers(0, 4 * 900, size=(8, 16, 2)) / 4.0
    joints = np.concatenate([xy, np.ones((8, 16, 1))], axis=2)
    seq = make_sequence(joints)
    origins = np.asarray(rng.integers(0, 500, size=(8, 2)), dtype=np.float64)
    back = to_full_frame(to_crop_coordinates(seq, origins))
    assert np.array_equal(back.joints, seq.joints)


def test_empty_sequence_round_trip():
    seq = make_sequence(np.zeros((0, 16, 3)))
    out = to_full_frame(to_crop_coordinates(seq, np.zeros((0, 2))))
    assert len(out) == 0


def test_wrong_direction_raises():
    rng = np.random.default_rng(7)
    seq = random_sequence(rng, T=3)
    with pytest.raises(ValueError):
        to_full_frame(seq)
    crop = to_crop_coordinates(seq, np.zeros((3, 2)))
    with pytest.raises(ValueError):
        to_crop_coordinates(crop, np.zeros((3, 2)))


def test_slice_frames():
    rng = np.random.default_rng(8)
    seq = random_sequence(rng, T=10)
    sub = seq.slice_frames(3, 6)
    assert sub.frame_indices.tolist() == [3, 4, 5, 6]
    assert np.array_equal(sub.joints, seq.joints[3:7])
