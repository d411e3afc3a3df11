"""Pose keypoint streams: wire format, validation, temporal smoothing.

The wire contract is JSON lines, one frame per line:

    {"fps": 30.0, "coords": "full", "origin_per_frame": false}   (optional header)
    {"frame": 17, "joints": [[x, y, confidence] x 16]}

Joints follow the 16-point MPII order (see `Joint`). Crop-local streams
("coords": "crop") carry an "origin": [x, y] per frame. Floats round-trip
bit-exactly through write/read.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace

import numpy as np
from scipy.ndimage import uniform_filter1d

from .errors import PoseFormatError

N_JOINTS = 16


class Joint(enum.IntEnum):
    R_ANKLE = 0
    R_KNEE = 1
    R_HIP = 2
    L_HIP = 3
    L_KNEE = 4
    L_ANKLE = 5
    PELVIS = 6
    THORAX = 7
    UPPER_NECK = 8
    HEAD_TOP = 9
    R_WRIST = 10
    R_ELBOW = 11
    R_SHOULDER = 12
    L_SHOULDER = 13
    L_ELBOW = 14
    L_WRIST = 15


# left/right partner joints, used when mirroring poses
FLIP_PAIRS = ((0, 5), (1, 4), (2, 3), (10, 15), (11, 14), (12, 13))


@dataclass
class PoseSequence:
    """Ordered per-frame 16-joint poses in one consistent coordinate frame."""

    frame_indices: np.ndarray  # (T,) int64, strictly increasing
    joints: np.ndarray  # (T, 16, 3) float64: x, y, confidence
    fps: float = 30.0
    coords: str = "full"  # "full" | "crop"
    origins: np.ndarray | None = None  # (T, 2) crop origins when coords == "crop"

    def __post_init__(self):
        self.frame_indices = np.asarray(self.frame_indices, dtype=np.int64)
        self.joints = np.asarray(self.joints, dtype=np.float64)
        if self.joints.ndim != 3 or self.joints.shape[1:] != (N_JOINTS, 3):
            raise ValueError(f"joints must have shape (T, {N_JOINTS}, 3)")
        if self.frame_indices.shape != (self.joints.shape[0],):
            raise ValueError("frame_indices length must match joints")
        if len(self.frame_indices) > 1 and not (np.diff(self.frame_indices) > 0).all():
            raise ValueError("frame indices must be strictly increasing")
        if not np.isfinite(self.joints[:, :, :2]).all():
            raise ValueError("joint coordinates must be finite")
        conf = self.joints[:, :, 2]
        if ((conf < 0) | (conf > 1)).any():
            raise ValueError("confidence must lie in [0, 1]")
        if self.coords not in ("full", "crop"):
            raise ValueError("coords must be 'full' or 'crop'")
        if self.origins is not None:
            self.origins = np.asarray(self.origins, dtype=np.float64)
            if self.origins.shape != (self.joints.shape[0], 2):
                raise ValueError("origins must have shape (T, 2)")

    def __len__(self) -> int:
        return self.joints.shape[0]

    def copy(self) -> "PoseSequence":
        return PoseSequence(
            frame_indices=self.frame_indices.copy(),
            joints=self.joints.copy(),
            fps=self.fps,
            coords=self.coords,
            origins=None if self.origins is None else self.origins.copy(),
        )

    def slice_frames(self, first: int, last: int) -> "PoseSequence":
        """Sub-sequence covering frame indices [first, last] inclusive."""
        keep = (self.frame_indices >= first) & (self.frame_indices <= last)
        return PoseSequence(
            frame_indices=self.frame_indices[keep],
            joints=self.joints[keep],
            fps=self.fps,
            coords=self.coords,
            origins=None if self.origins is None else self.origins[keep],
        )


def load_pose_sequence(path) -> PoseSequence:
    """Parse and validate a pose stream file."""
    fps = 30.0
    coords = "full"
    per_frame_origin = False
    indices: list[int] = []
    frames: list[list] = []
    origins: list[list] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise PoseFormatError(lineno, f"invalid JSON: {e.msg}") from None
            if "frame" not in obj:
                if lineno == 1 or not frames:
                    fps = float(obj.get("fps", fps))
                    coords = obj.get("coords", coords)
                    per_frame_origin = bool(obj.get("origin_per_frame", coords == "crop"))
                    continue
                raise PoseFormatError(lineno, "missing 'frame' field")
            joints = obj.get("joints")
            if not isinstance(joints, list) or len(joints) != N_JOINTS:
                n = len(joints) if isinstance(joints, list) else "no"
                raise PoseFormatError(lineno, f"expected {N_JOINTS} joints, got {n}")
            for j, row in enumerate(joints):
                if not isinstance(row, list) or len(row) != 3:
                    raise PoseFormatError(lineno, f"joint {j} must be [x, y, confidence]")
                x, y, c = row
                if not (np.isfinite(x) and np.isfinite(y)):
                    raise PoseFormatError(lineno, f"joint {j} has non-finite coordinates")
                if not 0.0 <= c <= 1.0:
                    raise PoseFormatError(lineno, f"joint {j} confidence {c} outside [0, 1]")
            idx = int(obj["frame"])
            if indices and idx <= indices[-1]:
                raise PoseFormatError(lineno, f"frame {idx} not after frame {indices[-1]}")
            indices.append(idx)
            frames.append(joints)
            if per_frame_origin and coords == "crop":
                origin = obj.get("origin")
                if not isinstance(origin, list) or len(origin) != 2:
                    raise PoseFormatError(lineno, "crop-local frame missing 'origin': [x, y]")
                origins.append(origin)
    joints_arr = np.asarray(frames, dtype=np.float64).reshape(len(frames), N_JOINTS, 3)
    return PoseSequence(
        frame_indices=np.asarray(indices, dtype=np.int64),
        joints=joints_arr,
        fps=fps,
        coords=coords,
        origins=np.asarray(origins, dtype=np.float64) if origins else None,
    )


def save_pose_sequence(seq: PoseSequence, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "fps": seq.fps,
            "coords": seq.coords,
            "origin_per_frame": seq.coords == "crop" and seq.origins is not None,
        }
        fh.write(json.dumps(header) + "\n")
        for t in range(len(seq)):
            obj = {
                "frame": int(seq.frame_indices[t]),
                "joints": [[float(v) for v in joint] for joint in seq.joints[t]],
            }
            if header["origin_per_frame"]:
                obj["origin"] = [float(v) for v in seq.origins[t]]
            fh.write(json.dumps(obj) + "\n")


def smooth_poses(seq: PoseSequence, window: int = 5, conf_floor: float = 0.2) -> PoseSequence:
    """Confidence-weighted centred moving average per joint coordinate.

    Joints below `conf_floor` contribute nothing to the average; their
    smoothed positions are rebuilt by linear interpolation from the
    neighbouring frames instead. A window of 1 is the identity.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    if window == 1 or len(seq) == 0:
        return seq.copy()
    xy = seq.joints[:, :, :2]
    conf = seq.joints[:, :, 2]
    valid = conf >= conf_floor
    w = np.where(valid, conf, 0.0)
    num = uniform_filter1d(xy * w[:, :, None], size=window, axis=0, mode="constant", cval=0.0)
    den = uniform_filter1d(w, size=window, axis=0, mode="constant", cval=0.0)
    safe_den = np.where(den > 0, den, 1.0)[:, :, None]
    averaged = num / safe_den
    t = seq.frame_indices.astype(np.float64)
    out = np.empty_like(xy)
    for j in range(N_JOINTS):
        good = valid[:, j]
        for c in range(2):
            if good.all():
                out[:, j, c] = averaged[:, j, c]
            elif good.any():
                out[:, j, c] = np.interp(t, t[good], averaged[good, j, c])
            else:
                out[:, j, c] = xy[:, j, c]  # no trustworthy samples at all
    joints = np.dstack([out, conf])
    return replace(seq.copy(), joints=joints)


def to_crop_coordinates(seq: PoseSequence, origins) -> PoseSequence:
    """Translate a full-frame sequence into per-frame crop-local pixels.

    Origins are crop top-left corners in full-frame pixels; integral
    origins keep the full/crop round trip exact.
    """
    if seq.coords != "full":
        raise ValueError("sequence is not in full-frame coordinates")
    origins = np.asarray(origins, dtype=np.float64)
    if origins.shape != (len(seq), 2):
        raise ValueError("need one origin per frame")
    joints = seq.joints.copy()
    joints[:, :, :2] -= origins[:, None, :]
    return PoseSequence(seq.frame_indices.copy(), joints, seq.fps, "crop", origins.copy())


def to_full_frame(seq: PoseSequence, origins=None) -> PoseSequence:
    """Translate a crop-local sequence back into full-frame pixels."""
    if seq.coords != "crop":
        raise ValueError("sequence is not in crop-local coordinates")
    if origins is None:
        origins = seq.origins
    if origins is None:
        raise ValueError("crop-local sequence has no origins")
    origins = np.asarray(origins, dtype=np.float64)
    if origins.shape != (len(seq), 2):
        raise ValueError("need one origin per frame")
    joints = seq.joints.copy()
    joints[:, :, :2] += origins[:, None, :]
    return PoseSequence(seq.frame_indices.copy(), joints, seq.fps, "full", None)
