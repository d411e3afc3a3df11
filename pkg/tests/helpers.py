"""Shared construction helpers for pose-based tests."""

import numpy as np

from trampkit.pose import FLIP_PAIRS, N_JOINTS, PoseSequence


def make_sequence(joints, fps=30.0, indices=None, coords="full", origins=None):
    joints = np.asarray(joints, dtype=np.float64)
    T = joints.shape[0]
    if indices is None:
        indices = np.arange(T)
    return PoseSequence(
        frame_indices=np.asarray(indices), joints=joints, fps=fps, coords=coords, origins=origins
    )


def random_sequence(rng, T=12, scale=200.0, conf=1.0):
    """Well-spread random poses (degenerate geometry is measure zero)."""
    xy = rng.uniform(10.0, scale, size=(T, N_JOINTS, 2))
    c = np.full((T, N_JOINTS, 1), conf)
    return make_sequence(np.concatenate([xy, c], axis=2))


def mirror_sequence(seq, axis_x=0.0):
    """Horizontal flip about x = axis_x with left/right labels swapped.

    This is the standard pose-estimation horizontal flip: after mirroring
    the image, the subject's right side plays the left side's role.
    """
    joints = seq.joints.copy()
    joints[:, :, 0] = 2.0 * axis_x - joints[:, :, 0]
    for a, b in FLIP_PAIRS:
        joints[:, [a, b]] = joints[:, [b, a]]
    return make_sequence(joints, fps=seq.fps, indices=seq.frame_indices.copy())


def straight_posture_pose(origin=(100.0, 50.0), conf=1.0):
    """Upright stick body, arms hanging straight down, legs straight.

    Elbows, knees and hips read 180 degrees; shoulders 0; torso 0; legs 0.
    Small lateral offsets keep left/right joints distinct.
    """
    ox, oy = origin
    d = 3.0  # lateral half-spacing between the two body sides
    pose = np.zeros((N_JOINTS, 3))
    pose[6] = [ox, oy + 100.0, conf]  # pelvis
    pose[7] = [ox, oy + 50.0, conf]  # thorax
    pose[8] = [ox, oy + 35.0, conf]  # upper neck
    pose[9] = [ox, oy, conf]  # head top
    pose[12] = [ox + d, oy + 50.0, conf]  # r shoulder
    pose[13] = [ox - d, oy + 50.0, conf]  # l shoulder
    pose[11] = [ox + d, oy + 85.0, conf]  # r elbow
    pose[14] = [ox - d, oy + 85.0, conf]  # l elbow
    pose[10] = [ox + d, oy + 120.0, conf]  # r wrist
    pose[15] = [ox - d, oy + 120.0, conf]  # l wrist
    pose[2] = [ox + d, oy + 100.0, conf]  # r hip
    pose[3] = [ox - d, oy + 100.0, conf]  # l hip
    pose[1] = [ox + d, oy + 145.0, conf]  # r knee
    pose[4] = [ox - d, oy + 145.0, conf]  # l knee
    pose[0] = [ox + d, oy + 190.0, conf]  # r ankle
    pose[5] = [ox - d, oy + 190.0, conf]  # l ankle
    return pose
