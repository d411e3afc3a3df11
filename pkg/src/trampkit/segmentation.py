"""Bounce segmentation from the vertical centroid track.

Bounce boundaries are the frames where the body is lowest, i.e. local
maxima of image-coordinate y. Consecutive boundaries delimit one skill;
sub-threshold apexes mark the in/out-bounces around the scored routine.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d
from scipy.signal import find_peaks

from .errors import FullContactError, SegmentationError, TrackTooShortError


@dataclass
class CentroidTrack:
    """Per-frame centroid positions; NaN marks frames with no subject."""

    xs: np.ndarray
    ys: np.ndarray
    fps: float = 30.0

    def __post_init__(self):
        self.xs = np.asarray(self.xs, dtype=np.float64)
        self.ys = np.asarray(self.ys, dtype=np.float64)
        if self.xs.shape != self.ys.shape or self.xs.ndim != 1:
            raise ValueError("xs and ys must be 1-d arrays of equal length")
        if self.fps <= 0:
            raise ValueError("fps must be positive")

    def __len__(self) -> int:
        return len(self.ys)

    def interpolated_y(self) -> np.ndarray:
        """y with missing frames filled by linear interpolation.

        Missing frames cluster exactly where the minima live (the body is
        occluded by the bed), so they must be bridged, not dropped.
        """
        return _fill_nan(self.ys)


def _fill_nan(values: np.ndarray) -> np.ndarray:
    out = np.asarray(values, dtype=np.float64).copy()
    bad = ~np.isfinite(out)
    if bad.all():
        raise TrackTooShortError("track has no valid samples")
    if bad.any():
        idx = np.arange(len(out))
        out[bad] = np.interp(idx[bad], idx[~bad], out[~bad])
    return out


def _boundary_candidate(y: np.ndarray, left: bool) -> int | None:
    """Index of a qualifying plateau-or-strict maximum at the track edge."""
    seq = y if left else y[::-1]
    v = seq[0]
    i = 0
    while i + 1 < len(seq) and seq[i + 1] == v:
        i += 1
    if i + 1 >= len(seq) or seq[i + 1] > v:
        return None  # flat track or rising inward: not a boundary
    mid = i // 2
    return mid if left else len(y) - 1 - mid


def find_minima(
    track: CentroidTrack,
    smooth_window: int = 5,
    min_separation: int = 10,
    min_prominence: float | None = None,
) -> list[int]:
    """Frames where the athlete is lowest (local maxima of smoothed y).

    Maxima must be separated by at least `min_separation` frames (the
    deeper one wins otherwise) and have prominence of at least
    `min_prominence` (default: 5% of the smoothed track amplitude).
    Plateaus resolve to their midpoint. Track endpoints are admitted as
    additional boundaries only when the track already oscillates, i.e. at
    least one interior maximum was found; a monotone track has no bounces.
    """
    if len(track) < 3:
        raise TrackTooShortError(f"need >= 3 samples, have {len(track)}")
    y = track.interpolated_y()
    if smooth_window > 1:
        y = uniform_filter1d(y, size=smooth_window, mode="nearest")
    if min_prominence is None:
        min_prominence = 0.05 * float(y.max() - y.min())
    interior, _ = find_peaks(
        y,
        distance=max(1, min_separation),
        prominence=min_prominence if min_prominence > 0 else None,
    )
    minima = [int(i) for i in interior]
    if not minima:
        return []
    for left in (True, False):
        cand = _boundary_candidate(y, left)
        if cand is None:
            continue
        nearest = minima[0] if left else minima[-1]
        valley = y[min(cand, nearest): max(cand, nearest) + 1].min()
        if y[cand] - valley < min_prominence:
            continue
        if abs(nearest - cand) < min_separation:
            if y[cand] > y[nearest]:  # endpoint is the deeper bottom
                if left:
                    minima[0] = cand
                else:
                    minima[-1] = cand
            continue
        if left:
            minima.insert(0, cand)
        else:
            minima.append(cand)
    return minima


@dataclass
class BounceSegment:
    """One bounce: inclusive frame range plus its apex."""

    start_frame: int
    end_frame: int
    apex_frame: int
    apex_height: float  # pixels above the trampoline line
    is_routine_jump: bool = True

    def __post_init__(self):
        if not self.start_frame < self.apex_frame <= self.end_frame:
            raise ValueError("apex must lie inside (start, end]")
        if self.apex_height < 0:
            raise ValueError("apex height must be non-negative")


def segment_routine(
    track: CentroidTrack,
    minima: list[int],
    apex_threshold: float = 0.5,
    line_row: float | None = None,
) -> list[BounceSegment]:
    """Segments between consecutive minima, flagged by relative apex height.

    Heights are measured above the trampoline line (default: the deepest
    track sample) so the threshold survives camera framing changes.
    Segments whose apex is below `apex_threshold` times the highest apex
    are not routine jumps; contiguous non-routine segments at the start
    and end are the in-bounces and out-bounce.
    """
    if sorted(minima) != list(minima):
        raise ValueError("minima must be sorted ascending")
    if len(minima) < 2:
        raise SegmentationError(f"need >= 2 minima to segment, have {len(minima)}")
    y = track.interpolated_y()
    if line_row is None:
        line_row = float(np.max(y))
    raw = []
    for s, e in zip(minima[:-1], minima[1:]):
        inner = y[s + 1: e + 1]
        apex = s + 1 + int(np.argmin(inner))
        height = max(0.0, float(line_row) - float(y[apex]))
        raw.append((int(s), int(e), apex, height))
    max_height = max(h for _, _, _, h in raw)
    return [
        BounceSegment(s, e, a, h, is_routine_jump=h >= apex_threshold * max_height)
        for s, e, a, h in raw
    ]


def routine_span(segments: list[BounceSegment]) -> tuple[int, int]:
    """Index range [first, last] of the routine jumps within the segments."""
    flags = [seg.is_routine_jump for seg in segments]
    if not any(flags):
        raise SegmentationError("no routine jumps above the apex threshold")
    return flags.index(True), len(flags) - 1 - flags[::-1].index(True)


def airborne_range(segment: BounceSegment, contact_flags) -> tuple[int, int]:
    """Longest contact-free frame run within the segment (inclusive)."""
    flags = np.asarray(contact_flags, dtype=bool)
    if len(flags) <= segment.end_frame:
        raise ValueError("contact flags do not cover the segment")
    best_len = 0
    best = None
    run_start = None
    for i in range(segment.start_frame, segment.end_frame + 1):
        if not flags[i]:
            if run_start is None:
                run_start = i
            if i - run_start + 1 > best_len:
                best_len = i - run_start + 1
                best = (run_start, i)
        else:
            run_start = None
    if best is None:
        raise FullContactError(
            f"segment [{segment.start_frame}, {segment.end_frame}] has no airborne frames"
        )
    return best
