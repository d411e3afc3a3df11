"""HTTP service for the annotation UI.

A thin stateful index over the same JSON artifacts the CLI writes, so both
front ends always agree. Documents carry integer revisions; every mutation
must present the current revision in an If-Match header and gets 409 on a
stale token. Writes go through an in-process lock per resource plus
write-temp-then-rename, so readers never observe a partial document.
"""

from __future__ import annotations

import json
import threading
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, Header, HTTPException, Response
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .catalog import catalog_as_json
from .classify import ReferenceSet, ReferenceSkill, classify, per_feature_mse
from .config import PipelineConfig
from .errors import SegmentationError, TrackTooShortError, UnknownCodeError
from .features import FeatureTrajectory
from .pipeline import read_json, rederive_segments, write_json


class LineUpdate(BaseModel):
    top_row: int


class LabelRequest(BaseModel):
    code: str
    add_to_reference_set: bool = False


class Store:
    """Disk layout: routines/<id>/{routine,track,segments}.json + crops/ +
    features/, reference_set.json, evaluation/latest.json."""

    def __init__(self, data_dir: Path, config: PipelineConfig):
        self.root = Path(data_dir)
        self.config = config
        self._locks: dict[str, threading.Lock] = defaultdict(threading.Lock)
        self._registry_lock = threading.Lock()

    def lock(self, name: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks[name]

    def routine_dir(self, rid: str) -> Path:
        path = (self.root / "routines" / rid).resolve()
        if not str(path).startswith(str((self.root / "routines").resolve())):
            raise HTTPException(404, "unknown routine")
        return path

    def routine_doc(self, rid: str) -> dict:
        path = self.routine_dir(rid) / "routine.json"
        if not path.exists():
            raise HTTPException(404, f"unknown routine {rid!r}")
        return read_json(path)

    def routine_ids(self) -> list[str]:
        base = self.root / "routines"
        if not base.is_dir():
            return []
        return sorted(p.name for p in base.iterdir() if (p / "routine.json").exists())

    def segments_doc(self, rid: str) -> dict:
        path = self.routine_dir(rid) / "segments.json"
        if not path.exists():
            raise HTTPException(404, f"routine {rid!r} has no segments")
        return read_json(path)

    def features_path(self, rid: str, seg_idx: int) -> Path:
        return self.routine_dir(rid) / "features" / f"features_{seg_idx:03d}.json"

    @property
    def refset_path(self) -> Path:
        return self.root / "reference_set.json"

    def load_refset(self) -> tuple[ReferenceSet, int]:
        if not self.refset_path.exists():
            return ReferenceSet(), 0
        doc = read_json(self.refset_path)
        return ReferenceSet.from_json_dict(doc), int(doc.get("revision", 0))

    def save_refset(self, refset: ReferenceSet, revision: int) -> None:
        doc = refset.to_json_dict()
        doc["revision"] = revision
        write_json(self.refset_path, doc)


def _require_revision(if_match: str | None, current: int) -> None:
    if if_match is None or if_match.strip('"') != str(current):
        raise HTTPException(
            status_code=409,
            detail={"error": "stale or missing revision token", "current_revision": current},
        )


def _split_segment_id(segment_id: str) -> tuple[str, int]:
    rid, sep, idx = segment_id.rpartition(":")
    if not sep or not idx.isdigit():
        raise HTTPException(404, "segment ids look like '<routine>:<index>'")
    return rid, int(idx)


def create_app(data_dir, config: PipelineConfig | None = None,
               frontend_dir=None) -> FastAPI:
    store = Store(Path(data_dir), config or PipelineConfig())
    app = FastAPI(title="trampkit service")

    @app.get("/api/catalog")
    def get_catalog():
        return JSONResponse(content=json.loads(catalog_as_json()))

    @app.get("/api/routines")
    def list_routines():
        out = []
        for rid in store.routine_ids():
            doc = store.routine_doc(rid)
            out.append({"id": rid, "fps": doc.get("fps"), "line": doc.get("line"),
                        "labels": doc.get("labels", {}), "revision": doc.get("revision", 1)})
        return out

    @app.get("/api/routines/{rid}")
    def get_routine(rid: str, response: Response):
        doc = store.routine_doc(rid)
        response.headers["ETag"] = f'"{doc.get("revision", 1)}"'
        return doc

    @app.get("/api/routines/{rid}/segments")
    def get_segments(rid: str):
        store.routine_doc(rid)
        return store.segments_doc(rid)

    @app.get("/api/routines/{rid}/poses")
    def get_poses(rid: str):
        path = store.routine_dir(rid) / "poses.jsonl"
        if not path.exists():
            raise HTTPException(404, f"routine {rid!r} has no pose stream")
        return FileResponse(path, media_type="application/x-ndjson")

    @app.get("/api/routines/{rid}/frames/{n}")
    def get_frame(rid: str, n: int):
        path = store.routine_dir(rid) / "crops" / f"{n:06d}.png"
        if not path.exists():
            raise HTTPException(404, f"no crop for frame {n}")
        return FileResponse(path, media_type="image/png")

    @app.get("/api/routines/{rid}/frames/{n}/meta")
    def get_frame_meta(rid: str, n: int):
        path = store.routine_dir(rid) / "crops" / f"{n:06d}.json"
        if not path.exists():
            raise HTTPException(404, f"no overlay metadata for frame {n}")
        return read_json(path)

    @app.put("/api/routines/{rid}/trampoline-line")
    def put_line(rid: str, update: LineUpdate, response: Response,
                 if_match: str | None = Header(default=None)):
        with store.lock(f"routine:{rid}"):
            doc = store.routine_doc(rid)
            _require_revision(if_match, doc.get("revision", 1))
            track_path = store.routine_dir(rid) / "track.json"
            if not track_path.exists():
                raise HTTPException(404, f"routine {rid!r} has no track")
            track_doc = read_json(track_path)
            height = track_doc.get("frame_height")
            if update.top_row < 0 or (height is not None and update.top_row >= height):
                raise HTTPException(422, f"line row {update.top_row} outside the frame")
            try:
                segments = rederive_segments(track_doc, update.top_row, store.config)
            except (SegmentationError, TrackTooShortError) as exc:
                raise HTTPException(409, f"segmentation failed at this line: {exc}") from None
            doc["line"] = {"top_row": update.top_row, "source": "user_adjusted"}
            doc["revision"] = doc.get("revision", 1) + 1
            write_json(store.routine_dir(rid) / "segments.json", segments)
            write_json(store.routine_dir(rid) / "routine.json", doc)
            response.headers["ETag"] = f'"{doc["revision"]}"'
            return {"routine": doc, "segments": segments}

    @app.post("/api/segments/{segment_id}/label")
    def label_segment(segment_id: str, req: LabelRequest, response: Response,
                      if_match: str | None = Header(default=None)):
        rid, seg_idx = _split_segment_id(segment_id)
        try:
            from .catalog import parse_code

            code = parse_code(req.code)
        except UnknownCodeError as exc:
            raise HTTPException(422, str(exc)) from None
        with store.lock(f"routine:{rid}"):
            doc = store.routine_doc(rid)
            _require_revision(if_match, doc.get("revision", 1))
            segments = store.segments_doc(rid)
            if seg_idx >= len(segments["segments"]):
                raise HTTPException(404, f"routine {rid!r} has no segment {seg_idx}")
            doc.setdefault("labels", {})[str(seg_idx)] = code
            doc["revision"] = doc.get("revision", 1) + 1
            entry_payload = None
            if req.add_to_reference_set:
                feat_path = store.features_path(rid, seg_idx)
                if not feat_path.exists():
                    raise HTTPException(
                        404, f"segment {segment_id} has no extracted features yet"
                    )
                traj = FeatureTrajectory.from_json_dict(read_json(feat_path))
                with store.lock("refset"):
                    refset, revision = store.load_refset()
                    entry = refset.add(
                        ReferenceSkill(code=code, trajectory=traj, routine_id=rid)
                    )
                    store.save_refset(refset, revision + 1)
                entry_payload = {"entry_id": entry.entry_id, "code": entry.code}
            write_json(store.routine_dir(rid) / "routine.json", doc)
            response.headers["ETag"] = f'"{doc["revision"]}"'
            return {"labels": doc["labels"], "revision": doc["revision"],
                    "reference_entry": entry_payload}

    @app.get("/api/segments/{segment_id}/features")
    def segment_features(segment_id: str):
        rid, seg_idx = _split_segment_id(segment_id)
        store.routine_doc(rid)
        feat_path = store.features_path(rid, seg_idx)
        if not feat_path.exists():
            raise HTTPException(404, f"segment {segment_id} has no extracted features yet")
        return read_json(feat_path)

    @app.post("/api/segments/{segment_id}/classify")
    def classify_segment(segment_id: str):
        rid, seg_idx = _split_segment_id(segment_id)
        store.routine_doc(rid)
        feat_path = store.features_path(rid, seg_idx)
        if not feat_path.exists():
            raise HTTPException(404, f"segment {segment_id} has no extracted features yet")
        refset, _ = store.load_refset()
        if len(refset) == 0:
            raise HTTPException(409, "reference set is empty")
        traj = FeatureTrajectory.from_json_dict(read_json(feat_path))
        result = classify(traj, refset)
        payload = result.to_json_dict()
        best = next(e for e in refset.entries if e.entry_id == result.ranked[0].entry_id)
        payload["per_feature"] = [float(v) for v in per_feature_mse(traj, best.trajectory)]
        return payload

    @app.get("/api/reference-set")
    def get_reference_set(response: Response):
        refset, revision = store.load_refset()
        doc = refset.to_json_dict()
        doc["revision"] = revision
        response.headers["ETag"] = f'"{revision}"'
        return doc

    @app.delete("/api/reference-set/{entry_id}")
    def delete_reference(entry_id: str, response: Response,
                         if_match: str | None = Header(default=None)):
        with store.lock("refset"):
            refset, revision = store.load_refset()
            _require_revision(if_match, revision)
            if not refset.remove(entry_id):
                raise HTTPException(404, f"no reference entry {entry_id!r}")
            store.save_refset(refset, revision + 1)
            response.headers["ETag"] = f'"{revision + 1}"'
            return {"deleted": entry_id, "revision": revision + 1}

    @app.get("/api/evaluation/latest")
    def latest_evaluation():
        path = store.root / "evaluation" / "latest.json"
        if not path.exists():
            raise HTTPException(404, "no evaluation has been run")
        return read_json(path)

    static_dir = Path(frontend_dir) if frontend_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
