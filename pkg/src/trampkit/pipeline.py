"""Stage drivers shared by the CLI and the HTTP service.

Extraction makes two passes over the frame source: the first builds the
centroid track, contact flags and bounce segments; the second prepares the
athlete crops (the crop side is a routine-wide quantity, so it cannot be
known mid-stream). All inter-stage artifacts are JSON files with the
schemas written here, so the CLI and the service never diverge.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .config import PipelineConfig
from .errors import FullContactError, InputError, NoTrampolineError
from .extraction import (
    BackgroundModel,
    TrampolineLine,
    contact_detect,
    detect_trampoline,
    extract_silhouette,
    foreground_mask,
    prepare_athlete_frame,
    update_background,
)
from .features import FeatureTrajectory, extract_features, shoulder_separation
from .pose import PoseSequence, smooth_poses
from .raster import Rect, Silhouette
from .segmentation import (
    BounceSegment,
    CentroidTrack,
    airborne_range,
    find_minima,
    segment_routine,
)


def write_json(path, obj) -> None:
    """Deterministic, atomic JSON write (sorted keys, trailing newline)."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump(obj, fh, sort_keys=True, indent=2)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class FrameRecord:
    """Per-frame extraction output, mask packed for the crop pass."""

    index: int
    centroid: tuple[float, float] | None
    bbox: tuple[int, int, int, int] | None
    hull: list[list[int]] | None
    in_contact: bool
    packed_mask: bytes | None = field(default=None, repr=False)


@dataclass
class ExtractionResult:
    line: TrampolineLine
    fps: float
    frames: list[FrameRecord]
    track: CentroidTrack
    segments: list[BounceSegment]
    airborne: list[tuple[int, int] | None]
    crop_side: int
    mask_shape: tuple[int, int]


def _silhouette_record(index: int, sil: Silhouette | None, line: TrampolineLine,
                       margin: int, keep_mask: bool) -> FrameRecord:
    if sil is None:
        # nothing above the bed: treat as contact (occlusion at the bed is
        # exactly when this happens); no crop is produced for such frames
        return FrameRecord(index, None, None, None, in_contact=True)
    contact = contact_detect(sil.bbox, line, margin)
    packed = np.packbits(sil.mask).tobytes() if keep_mask and not contact else None
    return FrameRecord(
        index=index,
        centroid=sil.centroid,
        bbox=(sil.bbox.x0, sil.bbox.y0, sil.bbox.x1, sil.bbox.y1),
        hull=sil.hull.tolist(),
        in_contact=contact,
        packed_mask=packed,
    )


def run_extraction(
    frame_source,
    config: PipelineConfig = PipelineConfig(),
    line: TrampolineLine | None = None,
    fps: float | None = None,
    keep_masks: bool = True,
) -> ExtractionResult:
    """First pass: background model, silhouettes, track, segmentation."""
    model = BackgroundModel(learning_rate=config.bg_alpha)
    records: list[FrameRecord] = []
    mask_shape = None
    for frame in frame_source():
        if line is None:
            try:
                line = detect_trampoline(
                    frame, config.hue_lo, config.hue_hi, config.sat_floor, config.row_coverage
                )
            except NoTrampolineError:
                raise NoTrampolineError(
                    "could not detect the trampoline on the first frame; "
                    "pass an explicit line row"
                ) from None
        update_background(model, frame)
        mask = foreground_mask(model, frame, config.fg_threshold, line)
        mask_shape = mask.shape
        sil = extract_silhouette(mask)
        records.append(
            _silhouette_record(frame.index, sil, line, config.contact_margin, keep_masks)
        )
    if not records:
        raise InputError("frame source produced no frames")

    xs = np.array([r.centroid[0] if r.centroid else np.nan for r in records])
    ys = np.array([r.centroid[1] if r.centroid else np.nan for r in records])
    track = CentroidTrack(xs=xs, ys=ys, fps=fps or config.fps)
    minima = find_minima(
        track, config.smooth_window, config.min_separation, config.min_prominence
    )
    segments = segment_routine(track, minima, config.apex_threshold, line_row=line.top_row)
    contact = [r.in_contact for r in records]
    airborne: list[tuple[int, int] | None] = []
    for seg in segments:
        try:
            airborne.append(airborne_range(seg, contact))
        except FullContactError:
            airborne.append(None)

    sides = [max(r.bbox[2] - r.bbox[0] + 1, r.bbox[3] - r.bbox[1] + 1)
             for r in records if r.bbox]
    crop_side = max(sides) if sides else 0
    return ExtractionResult(
        line=line,
        fps=track.fps,
        frames=records,
        track=track,
        segments=segments,
        airborne=airborne,
        crop_side=crop_side,
        mask_shape=mask_shape,
    )


def write_crops(result: ExtractionResult, frame_source, out_dir, config: PipelineConfig) -> int:
    """Second pass: square crops with suppressed background, plus overlay
    metadata sidecars, for every airborne frame."""
    from .frameio import write_frame_png

    os.makedirs(out_dir, exist_ok=True)
    by_index = {r.index: r for r in result.frames}
    written = 0
    for frame in frame_source():
        rec = by_index.get(frame.index)
        if rec is None or rec.in_contact or rec.packed_mask is None:
            continue
        h, w = result.mask_shape
        mask = np.unpackbits(np.frombuffer(rec.packed_mask, dtype=np.uint8))[: h * w]
        sil = Silhouette(
            mask=mask.reshape(h, w).astype(bool),
            centroid=rec.centroid,
            hull=np.asarray(rec.hull, dtype=np.int64),
            bbox=Rect(*rec.bbox),
        )
        athlete = prepare_athlete_frame(
            frame, sil, rec.in_contact, result.crop_side, config.blur_radius, config.darken
        )
        write_frame_png(athlete.crop, os.path.join(out_dir, f"{frame.index:06d}.png"))
        write_json(
            os.path.join(out_dir, f"{frame.index:06d}.json"),
            {
                "frame": frame.index,
                "origin": list(athlete.crop_origin),
                "centroid": list(rec.centroid),
                "bbox": list(rec.bbox),
                "hull": rec.hull,
                "in_contact": False,
            },
        )
        written += 1
    return written


# ---------------------------------------------------------------------------
# Artifact schemas
# ---------------------------------------------------------------------------


def track_document(result: ExtractionResult, routine_id: str) -> dict:
    return {
        "routine_id": routine_id,
        "fps": result.fps,
        "frame_height": result.mask_shape[0],
        "frame_width": result.mask_shape[1],
        "line": {"top_row": result.line.top_row, "source": result.line.source.value},
        "samples": [list(r.centroid) if r.centroid else None for r in result.frames],
        "bbox": [list(r.bbox) if r.bbox else None for r in result.frames],
        "contact": [bool(r.in_contact) for r in result.frames],
        "crop_side": result.crop_side,
    }


def segments_document(result: ExtractionResult, routine_id: str) -> dict:
    return {
        "routine_id": routine_id,
        "fps": result.fps,
        "line_row": result.line.top_row,
        "contact": [bool(r.in_contact) for r in result.frames],
        "segments": [
            {
                "start": seg.start_frame,
                "end": seg.end_frame,
                "apex": seg.apex_frame,
                "apex_height": seg.apex_height,
                "is_routine_jump": seg.is_routine_jump,
                "airborne": list(rng) if rng else None,
            }
            for seg, rng in zip(result.segments, result.airborne)
        ],
    }


def rederive_segments(track_doc: dict, line_row: int, config: PipelineConfig) -> dict:
    """Recompute contact flags, apex heights, flags and airborne ranges for
    a moved trampoline line, from the stored track document.

    Minima locations do not depend on the line, so boundaries are reused
    via a fresh detection on the stored samples.
    """
    samples = track_doc["samples"]
    xs = np.array([s[0] if s else np.nan for s in samples])
    ys = np.array([s[1] if s else np.nan for s in samples])
    track = CentroidTrack(xs=xs, ys=ys, fps=track_doc["fps"])
    contact = [
        True if bbox is None else bbox[3] >= line_row - config.contact_margin
        for bbox in track_doc["bbox"]
    ]
    minima = find_minima(track, config.smooth_window, config.min_separation,
                         config.min_prominence)
    segments = segment_routine(track, minima, config.apex_threshold, line_row=line_row)
    doc_segments = []
    for seg in segments:
        try:
            rng = airborne_range(seg, contact)
        except FullContactError:
            rng = None
        doc_segments.append(
            {
                "start": seg.start_frame,
                "end": seg.end_frame,
                "apex": seg.apex_frame,
                "apex_height": seg.apex_height,
                "is_routine_jump": seg.is_routine_jump,
                "airborne": list(rng) if rng else None,
            }
        )
    return {
        "routine_id": track_doc["routine_id"],
        "fps": track_doc["fps"],
        "line_row": line_row,
        "segments": doc_segments,
        "contact": contact,
    }


def run_features(
    seq: PoseSequence,
    segments_doc: dict | None,
    config: PipelineConfig = PipelineConfig(),
    routine_id: str = "",
) -> list[tuple[int, FeatureTrajectory]]:
    """Smooth the routine's poses and extract features per airborne segment.

    With no segments document the whole sequence is treated as one airborne
    skill. The twist normaliser is the smoothed routine-wide maximum
    shoulder separation, not the per-segment one.
    """
    smoothed = smooth_poses(seq, config.pose_smooth_window, config.conf_floor)
    sep = shoulder_separation(smoothed, config.conf_floor)
    sep_max = float(np.nanmax(sep)) if np.isfinite(sep).any() else None

    if segments_doc is None:
        traj = extract_features(smoothed, routine_sep_max=sep_max,
                                conf_floor=config.conf_floor)
        traj.skill_ref = f"{routine_id}:0" if routine_id else "0"
        return [(0, traj)]

    out: list[tuple[int, FeatureTrajectory]] = []
    for idx, seg in enumerate(segments_doc["segments"]):
        if not seg["is_routine_jump"] or not seg["airborne"]:
            continue
        first, last = seg["airborne"]
        piece = smoothed.slice_frames(first, last)
        if len(piece) < 2:
            continue
        traj = extract_features(piece, routine_sep_max=sep_max, conf_floor=config.conf_floor)
        traj.skill_ref = f"{routine_id}:{idx}" if routine_id else str(idx)
        out.append((idx, traj))
    return out
