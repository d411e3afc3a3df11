"""Parametric stick-body motion generator for trampoline skills.

Provides desk-scale ground truth: articulated 16-joint pose sequences and
centroid tracks realising named skills, plus a flat-shaded rasteriser that
draws the body onto frames for body-extraction tests.

The body model is a side-view projection. Somersault rotation drives the
trunk axis; limb flexion angles are key-framed programs evaluated on the
normalised flight time and eased with smoothstep between keys; twist is a
yaw program whose sine projects the shoulder and hip separations onto the
image. Lateral offsets are applied along the body's in-image perpendicular,
a deliberate simplification that keeps every feature well defined at any
rotation phase. Straddle differs from pike only by a small leg split and a
slightly weaker hip fold, so the pike/straddle pair stays the hardest case.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .catalog import parse_code
from .errors import InvalidModelError
from .pose import N_JOINTS, Joint, PoseSequence
from .segmentation import CentroidTrack

Program = list[tuple[float, float]]

PROGRAM_KEYS = (
    "torso", "yaw",
    "hip_r", "hip_l", "knee_r", "knee_l",
    "shoulder_r", "shoulder_l", "elbow_r", "elbow_l",
)

# body segment lengths as fractions of stature
_RATIOS = {
    "torso": 0.30,
    "neck": 0.055,
    "head": 0.125,
    "upper_arm": 0.185,
    "forearm": 0.145,
    "thigh": 0.245,
    "shank": 0.245,
    "shoulder_w": 0.26,
    "hip_w": 0.19,
}

STAND_YAW = 8.0  # degrees; slight off-axis stance keeps shoulders resolvable
_STAND = {"hip": 176.0, "knee": 176.0, "shoulder": 168.0, "elbow": 167.0}


@dataclass
class NoiseSpec:
    """Perturbations applied during generation; zero everywhere by default."""

    keypoint_sigma: float = 0.0  # px on every joint coordinate
    angle_sigma: float = 0.0  # degrees on every program key value
    timing_jitter: int = 0  # frames added/removed from the flight
    seed: int = 0

    def __post_init__(self):
        if self.keypoint_sigma < 0 or self.angle_sigma < 0 or self.timing_jitter < 0:
            raise ValueError("noise magnitudes must be non-negative")


@dataclass
class SkillMotionModel:
    """Key-framed motion programs realising one skill's flight."""

    code: str
    duration: float  # seconds of flight
    apex: float  # pelvis rise above standing pelvis height, px
    programs: dict[str, Program]
    stature: float = 170.0

    def __post_init__(self):
        parse_code(self.code)
        if self.duration <= 0 or self.apex <= 0:
            raise InvalidModelError(f"{self.code}: duration and apex must be positive")
        for key in PROGRAM_KEYS:
            prog = self.programs.get(key)
            if not prog:
                raise InvalidModelError(f"{self.code}: missing program {key!r}")
            times = [t for t, _ in prog]
            if times != sorted(times) or times[0] < 0.0 or times[-1] > 1.0:
                raise InvalidModelError(f"{self.code}: program {key!r} keys not in [0, 1] order")

    def to_json_dict(self) -> dict:
        return {
            "code": self.code,
            "duration": self.duration,
            "apex": self.apex,
            "stature": self.stature,
            "programs": {k: [[t, v] for t, v in prog] for k, prog in self.programs.items()},
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "SkillMotionModel":
        return cls(
            code=obj["code"],
            duration=float(obj["duration"]),
            apex=float(obj["apex"]),
            stature=float(obj.get("stature", 170.0)),
            programs={k: [(float(t), float(v)) for t, v in prog]
                      for k, prog in obj["programs"].items()},
        )


def eval_program(prog: Program, tau: np.ndarray) -> np.ndarray:
    """Evaluate a key-framed program with smoothstep easing between keys."""
    times = np.array([t for t, _ in prog], dtype=np.float64)
    values = np.array([v for _, v in prog], dtype=np.float64)
    tau = np.asarray(tau, dtype=np.float64)
    if len(prog) == 1:
        return np.full(tau.shape, values[0])
    out = np.empty_like(tau)
    seg = np.clip(np.searchsorted(times, tau, side="right") - 1, 0, len(times) - 2)
    t0, t1 = times[seg], times[seg + 1]
    v0, v1 = values[seg], values[seg + 1]
    span = np.where(t1 > t0, t1 - t0, 1.0)
    u = np.clip((tau - t0) / span, 0.0, 1.0)
    ease = u * u * (3.0 - 2.0 * u)
    out = v0 + (v1 - v0) * ease
    out = np.where(tau <= times[0], values[0], out)
    out = np.where(tau >= times[-1], values[-1], out)
    return out


def _rot(v: np.ndarray, degrees: float) -> np.ndarray:
    rad = math.radians(degrees)
    c, s = math.cos(rad), math.sin(rad)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


def pose_from_params(params: dict[str, float], pelvis: tuple[float, float],
                     stature: float = 170.0, facing: float = 1.0) -> np.ndarray:
    """Joint positions (16, 2) for one set of instantaneous program values."""
    L = {k: r * stature for k, r in _RATIOS.items()}
    phi = math.radians(params["torso"])
    sin_psi = math.sin(math.radians(params["yaw"]))
    d_up = np.array([math.sin(phi), -math.cos(phi)])
    d_down = -d_up
    perp = np.array([math.cos(phi), math.sin(phi)])

    pts = np.zeros((N_JOINTS, 2))
    pelvis_pt = np.array(pelvis, dtype=np.float64)
    thorax = pelvis_pt + L["torso"] * d_up
    neck = thorax + L["neck"] * d_up
    head = neck + L["head"] * d_up
    pts[Joint.PELVIS] = pelvis_pt
    pts[Joint.THORAX] = thorax
    pts[Joint.UPPER_NECK] = neck
    pts[Joint.HEAD_TOP] = head

    sh_off = 0.5 * L["shoulder_w"] * sin_psi * perp
    hip_off = 0.5 * L["hip_w"] * sin_psi * perp
    pts[Joint.R_SHOULDER] = thorax + sh_off
    pts[Joint.L_SHOULDER] = thorax - sh_off
    pts[Joint.R_HIP] = pelvis_pt + hip_off
    pts[Joint.L_HIP] = pelvis_pt - hip_off

    for side, sh_j, el_j, wr_j in (("r", Joint.R_SHOULDER, Joint.R_ELBOW, Joint.R_WRIST),
                                   ("l", Joint.L_SHOULDER, Joint.L_ELBOW, Joint.L_WRIST)):
        raise_deg = params[f"shoulder_{side}"]
        bend_deg = 180.0 - params[f"elbow_{side}"]
        ua_dir = _rot(d_down, -facing * raise_deg)
        elbow = pts[sh_j] + L["upper_arm"] * ua_dir
        fa_dir = _rot(ua_dir, facing * bend_deg)
        pts[el_j] = elbow
        pts[wr_j] = elbow + L["forearm"] * fa_dir

    for side, hip_j, kn_j, an_j in (("r", Joint.R_HIP, Joint.R_KNEE, Joint.R_ANKLE),
                                    ("l", Joint.L_HIP, Joint.L_KNEE, Joint.L_ANKLE)):
        fold_deg = 180.0 - params[f"hip_{side}"]
        bend_deg = 180.0 - params[f"knee_{side}"]
        thigh_dir = _rot(d_down, -facing * fold_deg)
        knee = pts[hip_j] + L["thigh"] * thigh_dir
        shank_dir = _rot(thigh_dir, facing * bend_deg)
        pts[kn_j] = knee
        pts[an_j] = knee + L["shank"] * shank_dir
    return pts


def standing_pelvis_height(stature: float = 170.0) -> float:
    return (_RATIOS["thigh"] + _RATIOS["shank"]) * stature


def _jittered_model(model: SkillMotionModel, noise: NoiseSpec, rng) -> SkillMotionModel:
    if noise.angle_sigma <= 0:
        return model
    programs = {
        key: [(t, v + rng.normal(0.0, noise.angle_sigma)) for t, v in prog]
        for key, prog in model.programs.items()
    }
    return replace(model, programs=programs)


def _flight_params(model: SkillMotionModel, tau: np.ndarray) -> dict[str, np.ndarray]:
    return {key: eval_program(model.programs[key], tau) for key in PROGRAM_KEYS}


def generate_skill(
    model: SkillMotionModel,
    fps: float = 30.0,
    noise: NoiseSpec = NoiseSpec(),
    start_x: float = 448.0,
    line_row: float = 400.0,
    rng: np.random.Generator | None = None,
) -> tuple[PoseSequence, CentroidTrack]:
    """One skill's flight as a pose sequence plus matching centroid track."""
    if fps <= 0:
        raise InvalidModelError("fps must be positive")
    if rng is None:
        rng = np.random.default_rng(noise.seed)
    model = _jittered_model(model, noise, rng)
    T = int(round(model.duration * fps)) + 1
    if noise.timing_jitter > 0:
        T += int(rng.integers(-noise.timing_jitter, noise.timing_jitter + 1))
    T = max(T, 4)
    tau = np.arange(T, dtype=np.float64) / (T - 1)
    params = _flight_params(model, tau)
    stand = standing_pelvis_height(model.stature)
    takeoff, landing = _code_positions(model.code)
    pelvis_y = line_row - _flight_path(
        _pelvis_rest_height(takeoff, stand), _pelvis_rest_height(landing, stand),
        model.apex, stand, tau,
    )
    joints = np.empty((T, N_JOINTS, 3))
    for t in range(T):
        frame_params = {k: float(v[t]) for k, v in params.items()}
        joints[t, :, :2] = pose_from_params(frame_params, (start_x, pelvis_y[t]), model.stature)
    joints[:, :, 2] = 1.0
    if noise.keypoint_sigma > 0:
        joints[:, :, :2] += rng.normal(0.0, noise.keypoint_sigma, size=(T, N_JOINTS, 2))
    seq = PoseSequence(frame_indices=np.arange(T), joints=joints, fps=fps)
    track = CentroidTrack(
        xs=joints[:, :, 0].mean(axis=1), ys=joints[:, :, 1].mean(axis=1), fps=fps
    )
    return seq, track


def max_shoulder_separation(model: SkillMotionModel, samples: int = 4096) -> float:
    """Analytic routine-normaliser: peak projected shoulder separation."""
    tau = np.arange(samples, dtype=np.float64) / (samples - 1)
    yaw = eval_program(model.programs["yaw"], tau)
    width = _RATIOS["shoulder_w"] * model.stature
    return float(width * np.abs(np.sin(np.radians(yaw))).max())


# ---------------------------------------------------------------------------
# Model construction
# ---------------------------------------------------------------------------

# boundary limb configuration per takeoff/landing position
_POSITION_LIMBS = {
    "feet": {"hip": _STAND["hip"], "knee": _STAND["knee"], "shoulder": _STAND["shoulder"]},
    "seat": {"hip": 92.0, "knee": 172.0, "shoulder": 60.0},
    "front": {"hip": 168.0, "knee": 168.0, "shoulder": 150.0},
    "back": {"hip": 150.0, "knee": 170.0, "shoulder": 150.0},
}

# torso attitude at each boundary position (facing +x)
_POSITION_ATTITUDE = {"feet": 0.0, "seat": 0.0, "front": 90.0, "back": -90.0}

# pelvis height above the bed when in contact; None means leg length (standing)
_POSITION_PELVIS = {"feet": None, "seat": 14.0, "front": 14.0, "back": 14.0}


def _code_positions(code: str) -> tuple[str, str]:
    takeoff, landing = _FLIGHTS[code][0], _FLIGHTS[code][1]
    return takeoff, landing


def _pelvis_rest_height(position: str, stand: float) -> float:
    fixed = _POSITION_PELVIS[position]
    return stand if fixed is None else fixed


def _flight_path(h_takeoff: float, h_landing: float, apex_above_stand: float,
                 stand: float, tau: np.ndarray) -> np.ndarray:
    """Pelvis height over flight: endpoints at the boundary rest heights,
    apex near `stand + apex_above_stand`."""
    bump = stand + apex_above_stand - 0.5 * (h_takeoff + h_landing)
    return h_takeoff + (h_landing - h_takeoff) * tau + bump * 4.0 * tau * (1.0 - tau)

# shapes: (hip, knee, shoulder, elbow, leg split degrees)
_SHAPE_TARGETS = {
    "tuck": (62.0, 48.0, 45.0, 70.0, 0.0),
    "pike": (52.0, 172.0, 50.0, 150.0, 0.0),
    "straddle": (66.0, 172.0, 55.0, 150.0, 9.0),
    "straight": None,
}

# per-code flight plan: (takeoff, landing, somersault degrees, twist halves,
#                        shape, duration s, apex px)
# durations are whole frame counts at 30 fps, so 60 fps sampling refines them
_FLIGHTS = {
    "F0F": ("feet", "feet", 0, 0, None, 1.2, 195.0),
    "FTF": ("feet", "feet", 0, 0, "tuck", 1.3, 195.0),
    "FPF": ("feet", "feet", 0, 0, "pike", 1.3, 195.0),
    "FSF": ("feet", "feet", 0, 0, "straddle", 1.3, 195.0),
    "F1F": ("feet", "feet", 0, 1, None, 1.3, 195.0),
    "F2F": ("feet", "feet", 0, 2, None, 1.4, 200.0),
    "F0S": ("feet", "seat", 0, 0, None, 1.2, 185.0),
    "F1S": ("feet", "seat", 0, 1, None, 1.2, 185.0),
    "S1S": ("seat", "seat", 0, 1, None, 1.2, 180.0),
    "S0F": ("seat", "feet", 0, 0, None, 1.2, 180.0),
    "S1F": ("seat", "feet", 0, 1, None, 1.3, 180.0),
    "F0R": ("feet", "front", 90, 0, None, 1.3, 190.0),
    "R0F": ("front", "feet", -90, 0, None, 1.3, 190.0),
    "F0B": ("feet", "back", -90, 0, None, 1.3, 190.0),
    "B0F": ("back", "feet", 90, 0, None, 1.3, 190.0),
    "B1F": ("back", "feet", 90, 1, None, 1.3, 190.0),
    "FSSt": ("feet", "feet", 360, 0, "tuck", 1.4, 210.0),
    "FSSp": ("feet", "feet", 360, 0, "pike", 1.4, 210.0),
    "BRIt": ("feet", "feet", 360, 1, "tuck", 1.5, 210.0),
    "BRIp": ("feet", "feet", 360, 1, "pike", 1.5, 210.0),
    "BRIs": ("feet", "feet", 360, 1, None, 1.5, 210.0),
    "CDI": ("feet", "back", 270, 0, None, 1.4, 205.0),
    "BSSt": ("feet", "feet", -360, 0, "tuck", 1.5, 210.0),
    "BSSp": ("feet", "feet", -360, 0, "pike", 1.5, 210.0),
    "BSSs": ("feet", "feet", -360, 0, None, 1.6, 212.0),
    "BSTt": ("feet", "seat", -360, 0, "tuck", 1.5, 208.0),
    "LBK": ("feet", "front", -270, 0, None, 1.4, 205.0),
    "CDYt": ("front", "feet", -450, 0, "tuck", 1.6, 212.0),
    "BHA": ("feet", "feet", -360, 1, None, 1.5, 212.0),
    "BBOt": ("back", "feet", 450, 1, "tuck", 1.6, 212.0),
    "RUI": ("feet", "feet", 360, 3, None, 1.6, 212.0),
    "FFR": ("feet", "feet", 360, 2, None, 1.6, 212.0),
    "FUB": ("feet", "feet", -360, 2, None, 1.6, 212.0),
}

# codes with at least the ten recorded examples the protocol needs
CLASSIFIED_CODES = (
    "F0F", "FTF", "FPF", "FSF", "F1F", "F2F", "F0S", "F1S", "S1S", "S0F",
    "S1F", "F0B", "B1F", "BRIt", "BRIp", "CDI", "BSSt", "BSSp", "BSSs", "BSTt",
)


def _limb_keys(start: float, neutral: float, shape: float | None,
               end: float, window: tuple[float, float, float, float]) -> Program:
    """Takeoff transition, optional shape pulse, landing transition."""
    w_in, hold_in, hold_out, w_out = window
    keys: Program = [(0.0, start)]
    if start != neutral:
        keys.append((min(0.18, w_in - 0.02) if shape is not None else 0.18, neutral))
    if shape is not None:
        base = neutral
        keys += [(w_in, base), (hold_in, shape), (hold_out, shape), (w_out, base)]
    if end != keys[-1][1]:
        hold_t = max(0.82, keys[-1][0] + 0.02)
        keys.append((hold_t, keys[-1][1]))
        keys.append((max(0.97, hold_t + 0.02), end))
    return keys


def build_model(code: str) -> SkillMotionModel:
    """Construct the built-in motion model for a catalog code."""
    code = parse_code(code)
    takeoff, landing, som_deg, twist_halves, shape, duration, apex = _FLIGHTS[code]
    att0 = _POSITION_ATTITUDE[takeoff]
    att1 = att0 + som_deg
    start = _POSITION_LIMBS[takeoff]
    end = _POSITION_LIMBS[landing]
    shape_vals = _SHAPE_TARGETS[shape] if shape else None
    window = (0.2, 0.34, 0.66, 0.8) if som_deg == 0 else (0.16, 0.3, 0.72, 0.84)

    if som_deg == 0 and att0 == att1:
        torso: Program = [(0.0, att0)]
    else:
        torso = [(0.0, att0), (0.08, att0), (0.9, att1), (1.0, att1)]
    if twist_halves == 0:
        yaw: Program = [(0.0, STAND_YAW)]
    else:
        yaw = [(0.0, STAND_YAW), (0.14, STAND_YAW),
               (0.86, STAND_YAW + 180.0 * twist_halves), (1.0, STAND_YAW + 180.0 * twist_halves)]

    split = shape_vals[4] if shape_vals else 0.0
    hip_shape = shape_vals[0] if shape_vals else None
    knee_shape = shape_vals[1] if shape_vals else None
    sh_shape = shape_vals[2] if shape_vals else None
    el_shape = shape_vals[3] if shape_vals else None

    programs = {
        "torso": torso,
        "yaw": yaw,
        "hip_r": _limb_keys(start["hip"], _STAND["hip"],
                            None if hip_shape is None else hip_shape - split,
                            end["hip"], window),
        "hip_l": _limb_keys(start["hip"], _STAND["hip"],
                            None if hip_shape is None else hip_shape + split,
                            end["hip"], window),
        "knee_r": _limb_keys(start["knee"], _STAND["knee"], knee_shape, end["knee"], window),
        "knee_l": _limb_keys(start["knee"], _STAND["knee"], knee_shape, end["knee"], window),
        "shoulder_r": _limb_keys(start["shoulder"], _STAND["shoulder"], sh_shape,
                                 end["shoulder"], window),
        "shoulder_l": _limb_keys(start["shoulder"], _STAND["shoulder"], sh_shape,
                                 end["shoulder"], window),
        "elbow_r": _limb_keys(_STAND["elbow"], _STAND["elbow"], el_shape,
                              _STAND["elbow"], window),
        "elbow_l": _limb_keys(_STAND["elbow"], _STAND["elbow"], el_shape,
                              _STAND["elbow"], window),
    }
    return SkillMotionModel(code=code, duration=duration, apex=apex, programs=programs)


def builtin_models() -> list[SkillMotionModel]:
    """Models for the twenty skills the evaluation protocol includes."""
    return [build_model(code) for code in CLASSIFIED_CODES]


# ---------------------------------------------------------------------------
# Routine assembly
# ---------------------------------------------------------------------------


@dataclass
class GroundTruthSegment:
    start: int
    end: int
    code: str | None  # None for in/out-bounces
    is_routine_jump: bool
    flight: tuple[int, int]  # airborne frame range (inclusive)


@dataclass
class RoutineGroundTruth:
    segments: list[GroundTruthSegment]
    line_row: float
    boundaries: list[int] = field(default_factory=list)


_IN_BOUNCE_APEX = 30.0
_CONTACT_SECONDS = 0.26
_BED_DIP = 18.0


def _contact_params(prev: dict[str, float], nxt: dict[str, float], tau: np.ndarray):
    """Blend limb programs through bed contact, rotation-normalised."""
    ease = tau * tau * (3.0 - 2.0 * tau)
    out = {}
    for key in PROGRAM_KEYS:
        a, b = prev[key], nxt[key]
        if key in ("torso", "yaw"):
            b = b + 360.0 * round((a - b) / 360.0)
        out[key] = a + (b - a) * ease
    return out


def generate_routine(
    codes: list[str],
    fps: float = 30.0,
    noise: NoiseSpec = NoiseSpec(),
    in_bounces: int = 3,
    out_bounce: bool = True,
    start_x: float = 448.0,
    line_row: float = 400.0,
    stature: float = 170.0,
    drift: float = 28.0,
) -> tuple[PoseSequence, CentroidTrack, RoutineGroundTruth]:
    """Chain skills with in/out-bounces into one continuous routine.

    Returns the full pose sequence, the matching centroid track, and exact
    segment boundaries (mid-contact frames) for segmentation tests.

    Successive bounces land up to `drift` px away from the routine centre
    with linear horizontal travel during flight; athletes never hit the
    same spot twice, and a background model relies on that.
    """
    if not codes:
        raise InvalidModelError("routine needs at least one skill code")
    rng = np.random.default_rng(noise.seed)
    bounce = replace(build_model("F0F"), duration=0.85, apex=_IN_BOUNCE_APEX)
    models = [bounce] * in_bounces + [build_model(c) for c in codes]
    flags = [False] * in_bounces + [True] * len(codes)
    if out_bounce:
        models.append(bounce)
        flags.append(False)

    stand = standing_pelvis_height(stature)
    contact_T = max(3, int(round(_CONTACT_SECONDS * fps)))
    all_joints: list[np.ndarray] = []
    # one landing spot per contact, spread over permuted slots so repeated
    # contacts never stack on the same pixels (drawn once; zero-noise runs
    # stay deterministic)
    slots = np.linspace(-drift, drift, len(models) + 1)
    spots = start_x + rng.permutation(slots) + rng.uniform(-3.0, 3.0, size=len(slots))

    def emit(params_seq, pelvis_ys, pelvis_xs):
        for p, py, px in zip(params_seq, pelvis_ys, pelvis_xs):
            all_joints.append(np.asarray(
                pose_from_params(p, (px, py), stature)))

    def boundary_params(model: SkillMotionModel, at_start: bool) -> dict[str, float]:
        tau = np.array([0.0 if at_start else 1.0])
        vals = _flight_params(model, tau)
        return {k: float(v[0]) for k, v in vals.items()}

    def contact_heights(position: str) -> np.ndarray:
        ctau = np.arange(contact_T, dtype=np.float64) / (contact_T - 1)
        rest = _pelvis_rest_height(position, stand)
        dip = _BED_DIP if rest == stand else 8.0
        return np.maximum(rest - dip * np.sin(np.pi * ctau), 4.0)

    # lead-in: short descent into the first contact
    lead_T = max(3, int(round(0.22 * fps)))
    lead_tau = np.arange(lead_T) / lead_T  # excludes the contact start frame
    first_stand = boundary_params(models[0], at_start=True)
    first_rest = _pelvis_rest_height(_code_positions(models[0].code)[0], stand)
    lead_h = first_rest + 42.0 * (1.0 - lead_tau) ** 2
    emit([first_stand] * lead_T, line_row - lead_h, np.full(lead_T, spots[0]))

    boundaries: list[int] = []
    flights: list[tuple[int, int]] = []

    jittered = [_jittered_model(m, noise, rng) for m in models]
    for i, model in enumerate(jittered):
        # contact before this flight, in this skill's takeoff position
        prev = boundary_params(jittered[i - 1], at_start=False) if i else first_stand
        nxt = boundary_params(model, at_start=True)
        ctau = np.arange(contact_T, dtype=np.float64) / (contact_T - 1)
        blended = _contact_params(prev, nxt, ctau)
        per_frame = [{k: float(blended[k][t]) for k in PROGRAM_KEYS} for t in range(contact_T)]
        takeoff, landing = _code_positions(model.code)
        boundaries.append(len(all_joints) + contact_T // 2)
        emit(per_frame, line_row - contact_heights(takeoff), np.full(contact_T, spots[i]))

        T = int(round(model.duration * fps)) + 1
        if noise.timing_jitter > 0:
            T += int(rng.integers(-noise.timing_jitter, noise.timing_jitter + 1))
        T = max(T, 4)
        tau = np.arange(T, dtype=np.float64) / (T - 1)
        params = _flight_params(model, tau)
        per_frame = [{k: float(params[k][t]) for k in PROGRAM_KEYS} for t in range(T)]
        pelvis_y = line_row - _flight_path(
            _pelvis_rest_height(takeoff, stand), _pelvis_rest_height(landing, stand),
            model.apex, stand, tau,
        )
        pelvis_x = spots[i] + (spots[i + 1] - spots[i]) * tau
        flights.append((len(all_joints), len(all_joints) + T - 1))
        emit(per_frame, pelvis_y, pelvis_x)

    # final contact in the last landing position
    last = boundary_params(jittered[-1], at_start=False)
    last_rest_pos = _code_positions(jittered[-1].code)[1]
    per_frame = [{k: float(v) for k, v in last.items()}] * contact_T
    boundaries.append(len(all_joints) + contact_T // 2)
    emit(per_frame, line_row - contact_heights(last_rest_pos), np.full(contact_T, spots[-1]))
    # end the clip mid-rise: the body leaves its contact imprint quickly and
    # the track finishes ascending, so no spurious terminal bottom appears
    tail_T = max(4, int(round(0.4 * fps)))
    tail_tau = np.arange(1, tail_T + 1) / tail_T
    tail_h = _pelvis_rest_height(last_rest_pos, stand) + 110.0 * tail_tau
    emit([last] * tail_T, line_row - tail_h, np.full(tail_T, spots[-1]))

    joints = np.empty((len(all_joints), N_JOINTS, 3))
    joints[:, :, :2] = np.stack(all_joints)
    joints[:, :, 2] = 1.0
    if noise.keypoint_sigma > 0:
        joints[:, :, :2] += rng.normal(0.0, noise.keypoint_sigma, size=joints[:, :, :2].shape)

    seq = PoseSequence(frame_indices=np.arange(len(joints)), joints=joints, fps=fps)
    track = CentroidTrack(xs=joints[:, :, 0].mean(axis=1),
                          ys=joints[:, :, 1].mean(axis=1), fps=fps)
    segments = [
        GroundTruthSegment(
            start=boundaries[i],
            end=boundaries[i + 1],
            code=models[i].code if flags[i] else None,
            is_routine_jump=flags[i],
            flight=flights[i],
        )
        for i in range(len(models))
    ]
    truth = RoutineGroundTruth(segments=segments, line_row=line_row, boundaries=boundaries)
    return seq, track, truth


def save_models(models: list[SkillMotionModel], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([m.to_json_dict() for m in models], fh, indent=2)


def load_models(path) -> list[SkillMotionModel]:
    with open(path, "r", encoding="utf-8") as fh:
        return [SkillMotionModel.from_json_dict(obj) for obj in json.load(fh)]


# ---------------------------------------------------------------------------
# Debug rasteriser
# ---------------------------------------------------------------------------

_BONES = (
    (Joint.R_ANKLE, Joint.R_KNEE), (Joint.R_KNEE, Joint.R_HIP), (Joint.R_HIP, Joint.PELVIS),
    (Joint.L_ANKLE, Joint.L_KNEE), (Joint.L_KNEE, Joint.L_HIP), (Joint.L_HIP, Joint.PELVIS),
    (Joint.PELVIS, Joint.THORAX), (Joint.THORAX, Joint.UPPER_NECK),
    (Joint.UPPER_NECK, Joint.HEAD_TOP),
    (Joint.R_WRIST, Joint.R_ELBOW), (Joint.R_ELBOW, Joint.R_SHOULDER),
    (Joint.R_SHOULDER, Joint.THORAX),
    (Joint.L_WRIST, Joint.L_ELBOW), (Joint.L_ELBOW, Joint.L_SHOULDER),
    (Joint.L_SHOULDER, Joint.THORAX),
)

# body-to-backdrop contrast is kept moderate (roughly 35..70 grey levels),
# matching hall footage; extreme contrast makes a running-average background
# model accumulate ghosts at the repeated contact spot
BODY_COLOR = (158, 122, 102)
BED_COLOR = (40, 70, 200)  # blue band, detectable in the default hue window


def _stamp_disc(canvas: np.ndarray, cx: float, cy: float, radius: int, color) -> None:
    h, w = canvas.shape[:2]
    x0 = max(0, int(cx) - radius)
    x1 = min(w, int(cx) + radius + 1)
    y0 = max(0, int(cy) - radius)
    y1 = min(h, int(cy) + radius + 1)
    if x0 >= x1 or y0 >= y1:
        return
    yy, xx = np.mgrid[y0:y1, x0:x1]
    inside = (xx - cx) ** 2 + (yy - cy) ** 2 <= radius**2
    canvas[y0:y1, x0:x1][inside] = color


def draw_body(canvas: np.ndarray, joints_xy: np.ndarray, radius: int = 6,
              color=BODY_COLOR) -> None:
    """Flat-shaded capsule body over the bone graph, plus a head disc."""
    for a, b in _BONES:
        p0, p1 = joints_xy[a], joints_xy[b]
        length = float(np.hypot(*(p1 - p0)))
        steps = max(2, int(length / max(1, radius // 2)) + 1)
        for t in np.linspace(0.0, 1.0, steps):
            p = p0 + (p1 - p0) * t
            _stamp_disc(canvas, p[0], p[1], radius, color)
    head = joints_xy[Joint.HEAD_TOP] * 0.6 + joints_xy[Joint.UPPER_NECK] * 0.4
    _stamp_disc(canvas, head[0], head[1], int(radius * 1.8), color)


def make_background(width: int, height: int, line_row: int, seed: int = 0) -> np.ndarray:
    """Static hall backdrop: gradient plus speckle, with the bed band."""
    rng = np.random.default_rng(seed)
    rows = np.linspace(95, 115, height, dtype=np.float64)[:, None]
    base = np.repeat(rows, width, axis=1)
    base = base + rng.integers(-8, 9, size=(height, width))
    canvas = np.clip(base, 0, 255).astype(np.uint8)[:, :, None].repeat(3, axis=2)
    band_lo = min(height, line_row)
    band_hi = min(height, line_row + 28)
    canvas[band_lo:band_hi] = BED_COLOR
    return canvas


def render_routine_frames(
    seq: PoseSequence,
    width: int = 896,
    height: int = 504,
    line_row: int = 400,
    lead_empty: int = 12,
    seed: int = 0,
):
    """Yield Frames: `lead_empty` background-only frames, then the body.

    The empty lead lets a running-average background model initialise
    cleanly, mirroring a recording that starts before the athlete mounts.
    """
    from .raster import Frame

    background = make_background(width, height, line_row, seed=seed)
    index = 0
    for _ in range(lead_empty):
        yield Frame(background.copy(), index=index)
        index += 1
    for t in range(len(seq)):
        canvas = background.copy()
        draw_body(canvas, seq.joints[t, :, :2])
        yield Frame(canvas, index=index)
        index += 1
