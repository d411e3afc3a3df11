"""Nearest-neighbour skill identification over angle trajectories.

References are resampled to the observed trajectory's length and scored
with the mean squared error over all frames and all 12 angle columns; the
reference with the minimum error names the skill. Ties break towards the
earlier reference in the set, so ranking is fully deterministic.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .catalog import parse_code
from .errors import EmptyReferenceSetError, ShapeMismatchError
from .features import N_FEATURES, FeatureTrajectory

REFSET_FORMAT_VERSION = 1


def resample(trajectory: FeatureTrajectory, target_len: int) -> FeatureTrajectory:
    """Linear resampling of every column onto a uniform grid of target_len.

    Endpoints are preserved exactly; resampling to the current length
    returns an identical copy.
    """
    if target_len < 2:
        raise ValueError(f"target length must be >= 2, got {target_len}")
    T = len(trajectory)
    if T == target_len:
        return FeatureTrajectory(
            angles=trajectory.angles.copy(), fps=trajectory.fps, skill_ref=trajectory.skill_ref
        )
    # arange/(n-1) grids make refinement hits bitwise exact
    src = np.arange(T, dtype=np.float64) / (T - 1)
    dst = np.arange(target_len, dtype=np.float64) / (target_len - 1)
    out = np.empty((target_len, trajectory.angles.shape[1]), dtype=np.float64)
    for col in range(trajectory.angles.shape[1]):
        out[:, col] = np.interp(dst, src, trajectory.angles[:, col])
    return FeatureTrajectory(angles=out, fps=trajectory.fps, skill_ref=trajectory.skill_ref)


def mse(observed: FeatureTrajectory, reference: FeatureTrajectory) -> float:
    """Mean squared error over all T x 12 angle cells, in squared degrees."""
    a = observed.angles
    b = reference.angles
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shape {a.shape} vs {b.shape}")
    d = a - b
    return float(np.mean(d * d))


@dataclass
class ReferenceSkill:
    """One labelled trajectory in the reference library."""

    code: str
    trajectory: FeatureTrajectory
    entry_id: str = ""
    routine_id: str | None = None
    athlete_id: str | None = None
    created_at: str | None = None

    def __post_init__(self):
        parse_code(self.code)


@dataclass
class ReferenceSet:
    """Ordered reference library; iteration order is insertion order."""

    entries: list[ReferenceSkill] = field(default_factory=list)
    version: int = REFSET_FORMAT_VERSION
    next_id: int = 0

    def add(self, skill: ReferenceSkill) -> ReferenceSkill:
        if not skill.entry_id:
            skill.entry_id = f"ref-{self.next_id:04d}"
            self.next_id += 1
        self.entries.append(skill)
        return skill

    def remove(self, entry_id: str) -> bool:
        for i, entry in enumerate(self.entries):
            if entry.entry_id == entry_id:
                del self.entries[i]
                return True
        return False

    def __len__(self) -> int:
        return len(self.entries)

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "next_id": self.next_id,
            "entries": [
                {
                    "entry_id": e.entry_id,
                    "code": e.code,
                    "routine_id": e.routine_id,
                    "athlete_id": e.athlete_id,
                    "created_at": e.created_at,
                    "trajectory": e.trajectory.to_json_dict(),
                }
                for e in self.entries
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ReferenceSet":
        refset = cls(version=int(obj.get("version", REFSET_FORMAT_VERSION)),
                     next_id=int(obj.get("next_id", 0)))
        for e in obj.get("entries", []):
            refset.entries.append(
                ReferenceSkill(
                    code=e["code"],
                    trajectory=FeatureTrajectory.from_json_dict(e["trajectory"]),
                    entry_id=e.get("entry_id", ""),
                    routine_id=e.get("routine_id"),
                    athlete_id=e.get("athlete_id"),
                    created_at=e.get("created_at"),
                )
            )
        return refset

    def save(self, path) -> None:
        """Write-temp-then-rename so readers never see a partial file."""
        path = os.fspath(path)
        directory = os.path.dirname(path) or "."
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".refset-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                json.dump(self.to_json_dict(), fh)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    @classmethod
    def load(cls, path) -> "ReferenceSet":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))


@dataclass(frozen=True)
class RankedMatch:
    entry_id: str
    code: str
    mse: float


@dataclass
class ClassificationResult:
    best: str
    best_mse: float
    ranked: list[RankedMatch]

    def to_json_dict(self) -> dict:
        return {
            "best": self.best,
            "best_mse": self.best_mse,
            "ranked": [
                {"entry_id": m.entry_id, "code": m.code, "mse": m.mse} for m in self.ranked
            ],
        }


def classify(observed: FeatureTrajectory, refs: ReferenceSet) -> ClassificationResult:
    """Rank every reference by MSE against the observed trajectory."""
    if len(refs) == 0:
        raise EmptyReferenceSetError("reference set is empty")
    if observed.angles.shape[1] != N_FEATURES:
        raise ShapeMismatchError("observed trajectory must have 12 columns")
    T = len(observed)
    scored = []
    for i, entry in enumerate(refs.entries):
        err = mse(observed, resample(entry.trajectory, T))
        scored.append((err, i, entry))
    scored.sort(key=lambda item: (item[0], item[1]))
    ranked = [RankedMatch(e.entry_id, e.code, err) for err, _, e in scored]
    return ClassificationResult(best=ranked[0].code, best_mse=ranked[0].mse, ranked=ranked)


def per_feature_mse(observed: FeatureTrajectory, reference: FeatureTrajectory) -> np.ndarray:
    """Column-wise contribution to the MSE (UI diagnostic)."""
    a = observed.angles
    b = resample(reference, len(observed)).angles
    d = a - b
    return (d * d).mean(axis=0)
