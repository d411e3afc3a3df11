"""Feature-angle trajectories from smoothed pose sequences.

Twelve angles per frame, column order:

    0, 1   right / left elbow      interior angle (shoulder, elbow, wrist)
    2, 3   right / left shoulder   interior angle (elbow, shoulder, hip)
    4, 5   right / left hip        interior angle (shoulder, hip, knee)
    6, 7   right / left knee       interior angle (hip, knee, ankle)
    8, 9   right / left leg        signed hip-to-ankle angle from image-down
    10     torso                   signed pelvis-to-thorax angle from image-up
    11     twist                   shoulder separation mapped to [0, 180]

Interior angles live in [0, 180]. Leg and torso angles are unwrapped over
the segment so a whole somersault accumulates 360 degrees instead of
wrapping; sign is positive for clockwise rotation on screen (y down).
Twist normalises the projected shoulder separation by its routine-wide
maximum: arccos gives [0, 90], extended to [0, 180] when the right
shoulder appears on the image-left of the left shoulder.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, FeatureError, ZeroSeparationError
from .pose import Joint, PoseSequence

N_FEATURES = 12

FEATURE_NAMES = (
    "r_elbow",
    "l_elbow",
    "r_shoulder",
    "l_shoulder",
    "r_hip",
    "l_hip",
    "r_knee",
    "l_knee",
    "r_leg",
    "l_leg",
    "torso",
    "twist",
)

# (a, b, c): interior angle at b between rays b->a and b->c
_INTERIOR = (
    (Joint.R_SHOULDER, Joint.R_ELBOW, Joint.R_WRIST),
    (Joint.L_SHOULDER, Joint.L_ELBOW, Joint.L_WRIST),
    (Joint.R_ELBOW, Joint.R_SHOULDER, Joint.R_HIP),
    (Joint.L_ELBOW, Joint.L_SHOULDER, Joint.L_HIP),
    (Joint.R_SHOULDER, Joint.R_HIP, Joint.R_KNEE),
    (Joint.L_SHOULDER, Joint.L_HIP, Joint.L_KNEE),
    (Joint.R_HIP, Joint.R_KNEE, Joint.R_ANKLE),
    (Joint.L_HIP, Joint.L_KNEE, Joint.L_ANKLE),
)

_EPS = 1e-6


@dataclass
class FeatureTrajectory:
    """T x 12 matrix of angles in degrees for one skill segment."""

    angles: np.ndarray  # (T, 12) float64
    fps: float = 30.0
    skill_ref: str = ""

    def __post_init__(self):
        self.angles = np.asarray(self.angles, dtype=np.float64)
        if self.angles.ndim != 2 or self.angles.shape[1] != N_FEATURES:
            raise ValueError(f"angles must have shape (T, {N_FEATURES})")
        if self.angles.shape[0] < 2:
            raise ValueError("trajectory needs at least 2 samples")
        if not np.isfinite(self.angles).all():
            raise ValueError("angles must be finite")

    def __len__(self) -> int:
        return self.angles.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "skill_ref": self.skill_ref,
            "fps": self.fps,
            "angles": [[float(v) for v in row] for row in self.angles],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "FeatureTrajectory":
        return cls(
            angles=np.asarray(obj["angles"], dtype=np.float64),
            fps=float(obj.get("fps", 30.0)),
            skill_ref=str(obj.get("skill_ref", "")),
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)

    @classmethod
    def load(cls, path) -> "FeatureTrajectory":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


def joint_angle(a, b, c) -> float:
    """Interior angle at b between rays b->a and b->c, in [0, 180] degrees."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    u = a - b
    v = c - b
    nu = float(np.hypot(*u))
    nv = float(np.hypot(*v))
    if nu < _EPS or nv < _EPS:
        raise DegenerateGeometryError(f"coincident points at angle vertex {b.tolist()}")
    cos = np.clip(float(u @ v) / (nu * nv), -1.0, 1.0)
    return float(np.degrees(np.arccos(cos)))


def torso_angle(pose: np.ndarray) -> float:
    """Signed pelvis-to-thorax lean from image-up, positive clockwise on
    screen, in (-180, 180]."""
    v = pose[Joint.THORAX, :2] - pose[Joint.PELVIS, :2]
    if np.hypot(*v) < _EPS:
        raise DegenerateGeometryError("pelvis and thorax coincide")
    return float(np.degrees(np.arctan2(v[0], -v[1])))


def leg_angle(pose: np.ndarray, side: str) -> float:
    """Signed hip-to-ankle angle from image-down, same sign sense as torso."""
    hip, ankle = {
        "right": (Joint.R_HIP, Joint.R_ANKLE),
        "left": (Joint.L_HIP, Joint.L_ANKLE),
    }[side]
    v = pose[ankle, :2] - pose[hip, :2]
    if np.hypot(*v) < _EPS:
        raise DegenerateGeometryError("hip and ankle coincide")
    return float(np.degrees(np.arctan2(-v[0], v[1])))


def unwrap(series) -> np.ndarray:
    """Remove 360-degree jumps so cumulative rotation is preserved."""
    series = np.asarray(series, dtype=np.float64)
    if series.size < 1:
        raise ValueError("cannot unwrap an empty series")
    return np.unwrap(series, period=360.0)


def shoulder_separation(seq: PoseSequence, conf_floor: float = 0.2) -> np.ndarray:
    """Projected shoulder distance per frame; NaN where unresolved."""
    xy = seq.joints[:, :, :2]
    conf = seq.joints[:, :, 2]
    sep = np.hypot(
        xy[:, Joint.R_SHOULDER, 0] - xy[:, Joint.L_SHOULDER, 0],
        xy[:, Joint.R_SHOULDER, 1] - xy[:, Joint.L_SHOULDER, 1],
    )
    ok = (conf[:, Joint.R_SHOULDER] >= conf_floor) & (conf[:, Joint.L_SHOULDER] >= conf_floor)
    return np.where(ok, sep, np.nan)


def twist_trajectory(
    seq: PoseSequence,
    sep_max: float | None = None,
    conf_floor: float = 0.2,
) -> np.ndarray:
    """Twist angle per frame in [0, 180] degrees.

    `sep_max` defaults to this sequence's own maximum; pass the routine-wide
    maximum when the sequence is one skill cut out of a longer routine.
    Frames with unresolved shoulders are NaN.
    """
    sep = shoulder_separation(seq, conf_floor)
    if sep_max is None:
        if not np.isfinite(sep).any():
            raise ZeroSeparationError("shoulders never resolved over the sequence")
        sep_max = float(np.nanmax(sep))
    if not np.isfinite(sep_max) or sep_max <= 0:
        raise ZeroSeparationError(f"shoulder separation maximum {sep_max} is unusable")
    ratio = np.clip(sep / sep_max, 0.0, 1.0)
    # arccos is infinitely sensitive at 1; separations within numerical
    # noise of the maximum count as the maximum
    ratio = np.where(ratio >= 1.0 - 1e-9, 1.0, ratio)
    base = np.degrees(np.arccos(ratio))
    facing_left = (
        seq.joints[:, Joint.R_SHOULDER, 0] < seq.joints[:, Joint.L_SHOULDER, 0]
    )
    return np.where(facing_left, 180.0 - base, base)


def _interior_series(xy, valid, a, b, c) -> np.ndarray:
    u = xy[:, a] - xy[:, b]
    v = xy[:, c] - xy[:, b]
    nu = np.hypot(u[:, 0], u[:, 1])
    nv = np.hypot(v[:, 0], v[:, 1])
    ok = valid[:, a] & valid[:, b] & valid[:, c] & (nu >= _EPS) & (nv >= _EPS)
    safe = np.where(ok, nu * nv, 1.0)
    cos = np.clip((u * v).sum(axis=1) / safe, -1.0, 1.0)
    ang = np.degrees(np.arccos(cos))
    return np.where(ok, ang, np.nan)


def _signed_series(xy, valid, frm, to, from_up: bool) -> np.ndarray:
    v = xy[:, to] - xy[:, frm]
    ok = valid[:, frm] & valid[:, to] & (np.hypot(v[:, 0], v[:, 1]) >= _EPS)
    if from_up:
        ang = np.degrees(np.arctan2(v[:, 0], -v[:, 1]))
    else:
        ang = np.degrees(np.arctan2(-v[:, 0], v[:, 1]))
    return np.where(ok, ang, np.nan)


def _unwrap_valid(series: np.ndarray) -> np.ndarray:
    out = series.copy()
    good = np.isfinite(series)
    if good.any():
        out[good] = np.unwrap(series[good], period=360.0)
    return out


def _fill_gaps(col: np.ndarray, t: np.ndarray, name: str) -> np.ndarray:
    good = np.isfinite(col)
    if not good.any():
        raise FeatureError(f"feature '{name}' has no valid frames")
    if good.all():
        return col
    return np.interp(t, t[good], col[good])


def extract_features(
    seq: PoseSequence,
    routine_sep_max: float | None = None,
    conf_floor: float = 0.2,
) -> FeatureTrajectory:
    """All 12 angle trajectories for one airborne skill segment.

    Frames where the joints of an angle are missing (low confidence) or
    geometrically degenerate are filled by linear interpolation in angle
    space. Leg and torso columns are unwrapped before interpolation.
    """
    T = len(seq)
    if T < 2:
        raise FeatureError(f"segment too short: {T} frames")
    xy = seq.joints[:, :, :2]
    conf = seq.joints[:, :, 2]
    valid = conf >= conf_floor
    if not valid.any():
        raise FeatureError("all joints missing over the segment")
    t = seq.frame_indices.astype(np.float64)

    cols: list[np.ndarray] = []
    for a, b, c in _INTERIOR:
        cols.append(_interior_series(xy, valid, a, b, c))
    cols.append(_unwrap_valid(_signed_series(xy, valid, Joint.R_HIP, Joint.R_ANKLE, False)))
    cols.append(_unwrap_valid(_signed_series(xy, valid, Joint.L_HIP, Joint.L_ANKLE, False)))
    cols.append(_unwrap_valid(_signed_series(xy, valid, Joint.PELVIS, Joint.THORAX, True)))
    cols.append(twist_trajectory(seq, sep_max=routine_sep_max, conf_floor=conf_floor))

    angles = np.column_stack(
        [_fill_gaps(col, t, FEATURE_NAMES[i]) for i, col in enumerate(cols)]
    )
    return FeatureTrajectory(angles=angles, fps=seq.fps)
