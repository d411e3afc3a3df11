"""Frame sources and sinks.

Two input forms: a directory of sequentially numbered PNG frames, or a raw
8-bit planar RGB stream (`.rgb` file with a JSON sidecar header giving
width, height, fps and frame count; per frame the R plane, then G, then B).
Video containers are out of scope; convert externally, e.g.

    ffmpeg -i routine.mp4 -vf scale=896:504 frames/%06d.png
"""

from __future__ import annotations

import json
import os
import re
from pathlib import Path
from typing import Iterator

import numpy as np
from PIL import Image

from .errors import InputError
from .raster import Frame

_NUM = re.compile(r"(\d+)")


def _frame_sort_key(name: str):
    match = _NUM.search(name)
    return (int(match.group(1)) if match else -1, name)


def list_frame_files(directory) -> list[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError(f"not a directory: {directory}")
    files = sorted(
        (p for p in directory.iterdir() if p.suffix.lower() == ".png"),
        key=lambda p: _frame_sort_key(p.name),
    )
    if not files:
        raise InputError(f"no PNG frames in {directory}")
    return files


def read_frame_dir(directory) -> Iterator[Frame]:
    """Frames from numbered PNGs, in numeric order, indexed from 0."""
    for index, path in enumerate(list_frame_files(directory)):
        with Image.open(path) as img:
            pixels = np.asarray(img.convert("RGB"), dtype=np.uint8)
        yield Frame(pixels=pixels, index=index)


def write_frame_png(frame: Frame, path) -> None:
    # low compression: frame dumps are bulk intermediates, encode speed wins
    Image.fromarray(frame.pixels, mode="RGB").save(path, format="PNG", compress_level=1)


def write_frame_dir(frames, directory) -> int:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    count = 0
    for frame in frames:
        write_frame_png(frame, directory / f"{frame.index:06d}.png")
        count += 1
    return count


def read_raw_stream(path) -> tuple[Iterator[Frame], dict]:
    """Planar RGB stream with sidecar header `<path>.json`."""
    path = Path(path)
    header_path = path.with_suffix(path.suffix + ".json")
    if not path.exists() or not header_path.exists():
        raise InputError(f"raw stream needs {path} and {header_path}")
    with open(header_path, "r", encoding="utf-8") as fh:
        header = json.load(fh)
    for key in ("width", "height", "frame_count"):
        if key not in header:
            raise InputError(f"raw stream header missing {key!r}")
    w, h = int(header["width"]), int(header["height"])
    count = int(header["frame_count"])
    plane = w * h
    expected = 3 * plane * count
    actual = os.path.getsize(path)
    if actual != expected:
        raise InputError(f"raw stream size {actual} != expected {expected}")

    def frames() -> Iterator[Frame]:
        with open(path, "rb") as fh:
            for index in range(count):
                buf = np.frombuffer(fh.read(3 * plane), dtype=np.uint8)
                planes = buf.reshape(3, h, w)
                yield Frame(pixels=np.ascontiguousarray(planes.transpose(1, 2, 0)), index=index)

    return frames(), header


def write_raw_stream(frames: list[Frame], path, fps: float = 30.0) -> None:
    path = Path(path)
    with open(path, "wb") as fh:
        for frame in frames:
            fh.write(np.ascontiguousarray(frame.pixels.transpose(2, 0, 1)).tobytes())
    h, w = frames[0].pixels.shape[:2]
    header = {"width": w, "height": h, "fps": fps, "frame_count": len(frames)}
    with open(path.with_suffix(path.suffix + ".json"), "w", encoding="utf-8") as fh:
        json.dump(header, fh)


def open_frame_source(path, fps_flag: float | None = None) -> tuple[callable, float]:
    """Resolve a frames directory or raw stream into (reopenable source, fps).

    The source is a zero-argument callable returning a fresh frame iterator;
    extraction makes two passes (silhouettes, then crops).
    """
    path = Path(path)
    if path.is_dir():
        meta = path / "meta.json"
        fps = fps_flag
        if fps is None and meta.exists():
            with open(meta, "r", encoding="utf-8") as fh:
                fps = json.load(fh).get("fps")
        return (lambda: read_frame_dir(path)), float(fps or 30.0)
    if path.suffix == ".rgb":
        _, header = read_raw_stream(path)
        fps = fps_flag if fps_flag is not None else header.get("fps", 30.0)
        return (lambda: read_raw_stream(path)[0]), float(fps)
    raise InputError(f"unsupported frame source: {path}")
