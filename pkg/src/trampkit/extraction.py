"""Per-frame athlete extraction.

Running-average background model, thresholded foreground masking clipped at
the trampoline line, silhouette construction via open-then-grow morphology,
hue-based trampoline line detection, bed-contact detection, and square crop
preparation with background suppression.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatchError, NoTrampolineError, UninitialisedModelError
from .raster import (
    BinaryMask,
    Frame,
    Rect,
    Silhouette,
    bounding_box,
    centroid,
    convex_hull,
    dilate,
    erode,
    largest_component,
)


class LineSource(enum.Enum):
    DETECTED = "detected"
    USER_ADJUSTED = "user_adjusted"


@dataclass(frozen=True)
class TrampolineLine:
    """Image row of the trampoline bed top."""

    top_row: int
    source: LineSource = LineSource.DETECTED


def set_trampoline_line(top_row: int) -> TrampolineLine:
    """Manual placement / fine-tuning of the bed line."""
    if top_row < 0:
        raise ValueError("trampoline line row must be non-negative")
    return TrampolineLine(top_row=int(top_row), source=LineSource.USER_ADJUSTED)


@dataclass
class BackgroundModel:
    """Per-pixel exponential running average of the scene.

    The accumulator is float32; per-frame memory traffic dominates the
    extraction budget and 8-bit inputs never need more precision.
    """

    learning_rate: float = 0.01
    mean: np.ndarray | None = field(default=None, repr=False)
    frames_seen: int = 0

    def __post_init__(self):
        if not 0.0 < self.learning_rate <= 1.0:
            raise ValueError("learning rate must be in (0, 1]")


def update_background(model: BackgroundModel, frame: Frame) -> BackgroundModel:
    """Fold one frame into the running average. First frame initialises it."""
    if model.mean is None:
        model.mean = frame.pixels.astype(np.float32)
    else:
        if model.mean.shape != frame.pixels.shape:
            raise DimensionMismatchError(
                f"frame shape {frame.pixels.shape} != model shape {model.mean.shape}"
            )
        a = model.learning_rate
        model.mean *= np.float32(1.0 - a)
        model.mean += np.multiply(frame.pixels, a, dtype=np.float32)
    model.frames_seen += 1
    return model


def foreground_mask(
    model: BackgroundModel,
    frame: Frame,
    threshold: float = 25.0,
    line: TrampolineLine | None = None,
) -> BinaryMask:
    """Pixels whose max channel deviation from the background exceeds the
    threshold. Rows at or below the trampoline line are cleared; the athlete
    is tracked above the bed only."""
    if model.mean is None:
        raise UninitialisedModelError("background model has no frames")
    if model.mean.shape != frame.pixels.shape:
        raise DimensionMismatchError(
            f"frame shape {frame.pixels.shape} != model shape {model.mean.shape}"
        )
    mask = None
    for c in range(3):
        diff = np.subtract(model.mean[:, :, c], frame.pixels[:, :, c], dtype=np.float32)
        np.abs(diff, out=diff)
        channel = diff > threshold
        mask = channel if mask is None else np.logical_or(mask, channel, out=mask)
    if line is not None and line.top_row < mask.shape[0]:
        mask[max(0, line.top_row):, :] = False
    return mask


def extract_silhouette(mask: BinaryMask) -> Silhouette | None:
    """Open-then-grow (erode x1, dilate x10, 2x2 kernel), keep the largest
    component, and derive centroid, hull and bounding box.

    Returns None when nothing survives morphology (no subject in frame).
    """
    morphed = dilate(erode(mask, 2, 2, 1), 2, 2, 10)
    body = largest_component(morphed)
    if not body.any():
        return None
    hull = convex_hull(body)
    return Silhouette(mask=body, centroid=centroid(body), hull=hull, bbox=bounding_box(hull))


def rgb_to_hue_sat(pixels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hue in degrees [0, 360) and saturation in [0, 1] per pixel."""
    rgb = pixels.astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = rgb.max(axis=2)
    minc = rgb.min(axis=2)
    delta = maxc - minc
    sat = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)
    hue = np.zeros_like(maxc)
    nz = delta > 0
    rmax = nz & (r == maxc)
    gmax = nz & ~rmax & (g == maxc)
    bmax = nz & ~rmax & ~gmax
    safe = np.where(nz, delta, 1.0)
    hue[rmax] = ((g - b) / safe)[rmax] % 6.0
    hue[gmax] = ((b - r) / safe)[gmax] + 2.0
    hue[bmax] = ((r - g) / safe)[bmax] + 4.0
    return hue * 60.0, sat


def detect_trampoline(
    frame: Frame,
    hue_lo: float = 170.0,
    hue_hi: float = 260.0,
    sat_floor: float = 0.25,
    row_coverage: float = 0.30,
) -> TrampolineLine:
    """Topmost row where enough saturated pixels fall inside the hue window.

    This is a best guess; the UI lets the user fine-tune the row.
    """
    hue, sat = rgb_to_hue_sat(frame.pixels)
    if hue_lo <= hue_hi:
        in_hue = (hue >= hue_lo) & (hue <= hue_hi)
    else:  # window wraps through 0 degrees
        in_hue = (hue >= hue_lo) | (hue <= hue_hi)
    qualified = in_hue & (sat >= sat_floor)
    coverage = qualified.mean(axis=1)
    rows = np.flatnonzero(coverage >= row_coverage)
    if rows.size == 0:
        raise NoTrampolineError(
            f"no row with >= {row_coverage:.0%} coverage in hue window "
            f"[{hue_lo}, {hue_hi}] at saturation >= {sat_floor}"
        )
    return TrampolineLine(top_row=int(rows[0]), source=LineSource.DETECTED)


def contact_detect(bbox: Rect, line: TrampolineLine, margin: int = 5) -> bool:
    """Bed contact: bounding-box bottom within `margin` rows of the line."""
    return bbox.bottom >= line.top_row - margin


def crop_window(center: tuple[float, float], side: int) -> tuple[int, int]:
    """Top-left corner of the square crop window centred on `center`."""
    half = side // 2
    return int(round(center[0])) - half, int(round(center[1])) - half


def prepare_crop(
    frame: Frame,
    silhouette: Silhouette,
    side: int,
    blur_radius: int = 7,
    darken: float = 0.4,
) -> Frame:
    """Square crop centred on the centroid with the background suppressed.

    The window is clamped to the frame by edge replication. Background
    pixels (outside the silhouette mask) are box-blurred and darkened;
    foreground pixels pass through untouched.
    """
    if side <= 0:
        raise ValueError("crop side must be positive")
    h, w = frame.pixels.shape[:2]
    x0, y0 = crop_window(silhouette.centroid, side)
    pad_l = max(0, -x0)
    pad_t = max(0, -y0)
    pad_r = max(0, x0 + side - w)
    pad_b = max(0, y0 + side - h)
    pixels = frame.pixels
    mask = silhouette.mask
    if pad_l or pad_t or pad_r or pad_b:
        pixels = np.pad(pixels, ((pad_t, pad_b), (pad_l, pad_r), (0, 0)), mode="edge")
        mask = np.pad(mask, ((pad_t, pad_b), (pad_l, pad_r)), mode="constant")
    ys = slice(y0 + pad_t, y0 + pad_t + side)
    xs = slice(x0 + pad_l, x0 + pad_l + side)
    crop = pixels[ys, xs].copy()
    if blur_radius == 0 and darken == 1.0:
        return Frame(pixels=crop, index=frame.index)
    fg = mask[ys, xs]
    background = crop.astype(np.float64)
    if blur_radius > 0:
        size = 2 * blur_radius + 1
        background = ndimage.uniform_filter(background, size=(size, size, 1), mode="nearest")
    background = np.clip(np.rint(background * darken), 0, 255).astype(np.uint8)
    out = np.where(fg[..., None], crop, background)
    return Frame(pixels=out, index=frame.index)


def max_bbox_side(silhouettes) -> int:
    """Routine-wide crop size: the largest bounding-box side seen."""
    sides = [s.bbox.side for s in silhouettes if s is not None]
    if not sides:
        raise ValueError("no silhouettes to size the crop from")
    return max(sides)


@dataclass
class AthleteFrame:
    """Extraction output for one frame; crop present iff airborne."""

    frame_index: int
    silhouette: Silhouette | None
    in_contact: bool
    crop: Frame | None = None
    crop_origin: tuple[int, int] | None = None


def prepare_athlete_frame(
    frame: Frame,
    silhouette: Silhouette | None,
    in_contact: bool,
    side: int,
    blur_radius: int = 7,
    darken: float = 0.4,
) -> AthleteFrame:
    """Assemble the per-frame result; crops exist only for airborne frames."""
    if silhouette is None:
        return AthleteFrame(frame.index, None, in_contact=True)
    if in_contact:
        return AthleteFrame(frame.index, silhouette, in_contact=True)
    crop = prepare_crop(frame, silhouette, side, blur_radius, darken)
    return AthleteFrame(
        frame_index=frame.index,
        silhouette=silhouette,
        in_contact=False,
        crop=crop,
        crop_origin=crop_window(silhouette.centroid, side),
    )
