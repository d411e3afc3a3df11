"""Binary-mask primitives for body extraction.

Masks are boolean numpy arrays of shape (height, width). Morphology uses a
full rectangular kernel anchored at its floor-centre cell, which for the
2x2 kernel is the top-left cell; pixels outside the frame are treated as
background. These conventions make every result bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyMaskError

BinaryMask = np.ndarray  # bool, (H, W)

_CONN8 = np.ones((3, 3), dtype=bool)


@dataclass
class Frame:
    """One video frame: 8-bit RGB pixels plus its index in the stream."""

    pixels: np.ndarray  # uint8, (H, W, 3)
    index: int = 0

    def __post_init__(self):
        if self.pixels.ndim != 3 or self.pixels.shape[2] != 3:
            raise ValueError("frame pixels must have shape (H, W, 3)")
        if self.pixels.shape[0] < 1 or self.pixels.shape[1] < 1:
            raise ValueError("frame dimensions must be positive")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle with inclusive pixel bounds."""

    x0: int
    y0: int
    x1: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    @property
    def side(self) -> int:
        return max(self.width, self.height)

    @property
    def bottom(self) -> int:
        return self.y1


@dataclass
class Silhouette:
    """Largest foreground component of one frame with derived geometry."""

    mask: BinaryMask
    centroid: tuple[float, float]
    hull: np.ndarray  # (K, 2) int64 vertices [x, y]
    bbox: Rect


def _shifted(mask: BinaryMask, d: int, axis: int) -> BinaryMask:
    """out[i] = mask[i + d] along axis, False outside the array."""
    out = np.zeros_like(mask)
    n = mask.shape[axis]
    if abs(d) >= n:
        return out
    src = [slice(None)] * mask.ndim
    dst = [slice(None)] * mask.ndim
    if d >= 0:
        src[axis] = slice(d, n)
        dst[axis] = slice(0, n - d)
    else:
        src[axis] = slice(0, n + d)
        dst[axis] = slice(-d, n)
    out[tuple(dst)] = mask[tuple(src)]
    return out


def _window_reduce(mask: BinaryMask, lo: int, hi: int, axis: int, op) -> BinaryMask:
    acc = _shifted(mask, lo, axis)
    for d in range(lo + 1, hi + 1):
        op(acc, _shifted(mask, d, axis), out=acc)
    return acc


def _morph(mask: BinaryMask, kernel_w: int, kernel_h: int, iterations: int, op) -> BinaryMask:
    if kernel_w < 1 or kernel_h < 1:
        raise ValueError("kernel dimensions must be >= 1")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    if mask.dtype != bool:
        mask = mask.astype(bool)
    if iterations == 0 or (kernel_w == 1 and kernel_h == 1):
        return mask.copy()
    out = mask
    # n iterations of a rectangular kernel compose into one window per axis
    for axis, k in ((1, kernel_w), (0, kernel_h)):
        if k == 1:
            continue
        anchor = (k - 1) // 2
        lo = -iterations * anchor
        hi = iterations * (k - 1 - anchor)
        out = _window_reduce(out, lo, hi, axis, op)
    return out


def erode(mask: BinaryMask, kernel_w: int, kernel_h: int, iterations: int = 1) -> BinaryMask:
    """Binary erosion: a pixel survives iff the whole kernel window is set."""
    return _morph(mask, kernel_w, kernel_h, iterations, np.logical_and)


def dilate(mask: BinaryMask, kernel_w: int, kernel_h: int, iterations: int = 1) -> BinaryMask:
    """Binary dilation: a pixel is set iff any pixel of the kernel window is."""
    return _morph(mask, kernel_w, kernel_h, iterations, np.logical_or)


def largest_component(mask: BinaryMask) -> BinaryMask:
    """Largest 8-connected component; ties broken by first row-major pixel."""
    if mask.dtype != bool:
        mask = mask.astype(bool)
    if not mask.any():
        return np.zeros_like(mask)
    labels, _ = ndimage.label(mask, structure=_CONN8)
    counts = np.bincount(labels.ravel())
    counts[0] = 0
    best = counts.max()
    tied = np.flatnonzero(counts == best)
    if len(tied) == 1:
        pick = int(tied[0])
    else:
        flat = labels.ravel()
        # tie-break on first row-major occurrence
        pick = min((int(np.argmax(flat == lab)), int(lab)) for lab in tied)[1]
    return labels == pick


def centroid(mask: BinaryMask) -> tuple[float, float]:
    """Method-of-moments centroid (m10/m00, m01/m00) of foreground pixels."""
    ys, xs = np.nonzero(mask)
    m00 = xs.size
    if m00 == 0:
        raise EmptyMaskError("centroid of empty mask")
    return float(xs.sum(dtype=np.float64) / m00), float(ys.sum(dtype=np.float64) / m00)


def _row_extremes(mask: BinaryMask) -> list[tuple[int, int]]:
    """Per-row leftmost/rightmost foreground pixels (hull candidates)."""
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return []
    change = np.flatnonzero(np.diff(ys))
    starts = np.concatenate(([0], change + 1))
    ends = np.concatenate((change, [ys.size - 1]))
    pts = set()
    for s, e in zip(starts.tolist(), ends.tolist()):
        pts.add((int(xs[s]), int(ys[s])))
        pts.add((int(xs[e]), int(ys[e])))
    return sorted(pts)


def _cross(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(mask: BinaryMask) -> np.ndarray:
    """Convex hull of foreground pixel coordinates.

    Vertices [x, y] in counter-clockwise order for the x-right/y-up sign
    convention (positive shoelace area), with no collinear vertices.
    Degenerate inputs give 1- or 2-vertex polygons.
    """
    pts = _row_extremes(mask)
    if not pts:
        raise EmptyMaskError("convex hull of empty mask")
    if len(pts) == 1:
        return np.array(pts, dtype=np.int64)
    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return np.array(hull, dtype=np.int64)


def bounding_box(hull: np.ndarray) -> Rect:
    """Tight axis-aligned bounds of a polygon's vertices."""
    if len(hull) == 0:
        raise ValueError("bounding box of empty polygon")
    xs = hull[:, 0]
    ys = hull[:, 1]
    return Rect(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
