"""Pipeline configuration: every tunable default in one JSON-mirrorable place."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields


@dataclass
class PipelineConfig:
    # background model and foreground masking
    bg_alpha: float = 0.01
    fg_threshold: float = 25.0
    # trampoline line detection (blue beds by default)
    hue_lo: float = 170.0
    hue_hi: float = 260.0
    sat_floor: float = 0.25
    row_coverage: float = 0.30
    # crop preparation
    blur_radius: int = 7
    darken: float = 0.4
    # contact detection
    contact_margin: int = 5
    # bounce segmentation
    smooth_window: int = 5
    min_separation: int = 10
    min_prominence: float | None = None  # None: 5% of track amplitude
    apex_threshold: float = 0.5
    # pose smoothing and feature extraction
    pose_smooth_window: int = 5
    conf_floor: float = 0.2
    # frame rate assumed when the input carries none
    fps: float = 30.0

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def from_json(cls, path) -> "PipelineConfig":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)
