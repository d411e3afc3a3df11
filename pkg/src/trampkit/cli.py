"""Command-line drivers for every pipeline stage.

Exit codes: 0 success, 2 input error, 3 pipeline failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import catalog_as_json, parse_code
from .classify import ReferenceSet, classify
from .config import PipelineConfig
from .errors import (
    FeatureError,
    FullContactError,
    InputError,
    NoTrampolineError,
    PoseFormatError,
    SegmentationError,
    TrackTooShortError,
    TrampkitError,
    UnknownCodeError,
    ZeroSeparationError,
)
from .evaluate import EvalConfig, export_confusion, run_evaluation
from .extraction import set_trampoline_line
from .features import FeatureTrajectory, extract_features
from .frameio import open_frame_source, write_frame_dir
from .pipeline import (
    read_json,
    run_extraction,
    run_features,
    segments_document,
    track_document,
    write_crops,
    write_json,
)
from .pose import load_pose_sequence, save_pose_sequence, to_full_frame
from .synthgen import (
    NoiseSpec,
    build_model,
    generate_routine,
    generate_skill,
    max_shoulder_separation,
    render_routine_frames,
)

_INPUT_ERRORS = (InputError, PoseFormatError, UnknownCodeError, FileNotFoundError,
                 NotADirectoryError, json.JSONDecodeError)
_PIPELINE_ERRORS = (NoTrampolineError, SegmentationError, TrackTooShortError,
                    FullContactError, FeatureError, ZeroSeparationError)


def _load_config(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return PipelineConfig.from_json(args.config)
    return PipelineConfig()


def cmd_extract(args) -> int:
    config = _load_config(args)
    source, fps = open_frame_source(args.frames, args.fps)
    line = set_trampoline_line(args.line) if args.line is not None else None
    result = run_extraction(source, config, line=line, fps=fps)
    routine_id = args.routine_id or Path(args.frames).stem
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "track.json", track_document(result, routine_id))
    write_json(out / "segments.json", segments_document(result, routine_id))
    write_json(
        out / "routine.json",
        {
            "id": routine_id,
            "source": str(args.frames),
            "fps": result.fps,
            "line": {"top_row": result.line.top_row, "source": result.line.source.value},
            "labels": {},
            "revision": 1,
        },
    )
    n_crops = write_crops(result, source, out / "crops", config)
    n_jumps = sum(1 for s in result.segments if s.is_routine_jump)
    print(f"{routine_id}: {len(result.frames)} frames, {len(result.segments)} segments "
          f"({n_jumps} routine jumps), {n_crops} crops, line row {result.line.top_row}")
    return 0


def cmd_features(args) -> int:
    config = _load_config(args)
    seq = load_pose_sequence(args.poses)
    if seq.coords == "crop":
        seq = to_full_frame(seq)
    segments_doc = read_json(args.segments) if args.segments else None
    routine_id = args.routine_id or (segments_doc or {}).get("routine_id", "")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = run_features(seq, segments_doc, config, routine_id=routine_id)
    if not results:
        print("no airborne routine segments to extract", file=sys.stderr)
        return 3
    for idx, traj in results:
        write_json(out / f"features_{idx:03d}.json", traj.to_json_dict())
    print(f"wrote {len(results)} feature trajectories to {out}")
    return 0


def cmd_classify(args) -> int:
    traj = FeatureTrajectory.from_json_dict(read_json(args.features))
    refs = ReferenceSet.load(args.refs)
    result = classify(traj, refs)
    payload = result.to_json_dict()
    if args.out:
        write_json(args.out, payload)
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def cmd_evaluate(args) -> int:
    dataset_dir = Path(args.dataset)
    if not dataset_dir.is_dir():
        raise InputError(f"not a dataset directory: {dataset_dir}")
    dataset = {}
    for code_dir in sorted(p for p in dataset_dir.iterdir() if p.is_dir()):
        code = parse_code(code_dir.name)
        items = [FeatureTrajectory.from_json_dict(read_json(p))
                 for p in sorted(code_dir.glob("*.json"))]
        if items:
            dataset[code] = items
    if not dataset:
        raise InputError(f"no feature files found under {dataset_dir}")
    cfg = EvalConfig(
        references_per_skill=args.references,
        tests_per_skill=args.tests,
        subset_size=args.subset,
        iterations=args.iterations,
        min_examples=args.min_examples,
        rng_seed=args.seed,
    )
    result = run_evaluation(dataset, cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    counts_path, rates_path = export_confusion(result.confusion, out / "confusion.csv")
    report = result.report_json(confusion_csv_path=str(counts_path))
    (out / "report.json").write_text(report, encoding="utf-8")
    print(f"mean accuracy {result.mean_accuracy:.4f} over {cfg.iterations} iterations; "
          f"report in {out / 'report.json'}")
    return 0


def cmd_generate(args) -> int:
    codes = [parse_code(c) for c in args.codes]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    noise = NoiseSpec(
        keypoint_sigma=args.noise_keypoint,
        angle_sigma=args.noise_angle,
        timing_jitter=args.timing_jitter,
        seed=args.seed,
    )
    if args.dataset:
        for i, code in enumerate(codes):
            model = build_model(code)
            sep_max = max_shoulder_separation(model)
            code_dir = out / code
            code_dir.mkdir(exist_ok=True)
            for k in range(args.samples):
                sample_noise = NoiseSpec(
                    keypoint_sigma=noise.keypoint_sigma,
                    angle_sigma=noise.angle_sigma,
                    timing_jitter=noise.timing_jitter,
                    seed=args.seed + i * 1000 + k,
                )
                seq, _ = generate_skill(model, fps=args.fps, noise=sample_noise)
                traj = extract_features(seq, routine_sep_max=sep_max)
                traj.skill_ref = f"{code}:{k}"
                write_json(code_dir / f"{k:03d}.json", traj.to_json_dict())
        print(f"dataset: {len(codes)} skills x {args.samples} samples in {out}")
        return 0
    if args.routine:
        seq, track, truth = generate_routine(codes, fps=args.fps, noise=noise)
        save_pose_sequence(seq, out / "routine.poses.jsonl")
        write_json(
            out / "routine.truth.json",
            {
                "codes": codes,
                "line_row": truth.line_row,
                "boundaries": truth.boundaries,
                "segments": [
                    {
                        "start": s.start,
                        "end": s.end,
                        "code": s.code,
                        "is_routine_jump": s.is_routine_jump,
                        "flight": list(s.flight),
                    }
                    for s in truth.segments
                ],
            },
        )
        if args.render:
            frames = render_routine_frames(seq, line_row=int(truth.line_row), seed=args.seed)
            n = write_frame_dir(frames, args.render)
            write_json(Path(args.render) / "meta.json", {"fps": args.fps})
            print(f"rendered {n} frames to {args.render}")
        print(f"routine with {len(codes)} skills: {len(seq)} frames in {out}")
        return 0
    for code in codes:
        seq, track = generate_skill(build_model(code), fps=args.fps, noise=noise)
        save_pose_sequence(seq, out / f"{code}.poses.jsonl")
    print(f"wrote {len(codes)} pose files to {out}")
    return 0


def cmd_catalog(args) -> int:
    payload = catalog_as_json()
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    print(payload)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.data_dir), _load_config(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trampkit",
        description="Trampoline routine analysis and skill identification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="body extraction and bounce segmentation")
    p.add_argument("--frames", required=True, help="PNG frame directory or .rgb stream")
    p.add_argument("--out", required=True)
    p.add_argument("--fps", type=float, default=None)
    p.add_argument("--line", type=int, default=None, help="trampoline line row override")
    p.add_argument("--config", default=None)
    p.add_argument("--routine-id", default=None)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("features", help="pose smoothing and feature-angle extraction")
    p.add_argument("--poses", required=True)
    p.add_argument("--segments", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--routine-id", default=None)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("classify", help="rank a trajectory against a reference set")
    p.add_argument("--features", required=True)
    p.add_argument("--refs", required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="repeated random split evaluation")
    p.add_argument("--dataset", required=True, help="directory of <code>/<n>.json features")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iterations", type=int, default=20)
    p.add_argument("--references", type=int, default=5)
    p.add_argument("--tests", type=int, default=5)
    p.add_argument("--subset", type=int, default=10)
    p.add_argument("--min-examples", type=int, default=10)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("generate", help="synthetic skills, routines and datasets")
    p.add_argument("codes", nargs="+", metavar="CODE")
    p.add_argument("--out", required=True)
    p.add_argument("--routine", action="store_true", help="chain the codes into one routine")
    p.add_argument("--dataset", action="store_true", help="emit a feature dataset per code")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--noise-angle", type=float, default=0.0)
    p.add_argument("--noise-keypoint", type=float, default=0.0)
    p.add_argument("--timing-jitter", type=int, default=0)
    p.add_argument("--render", default=None, help="also render routine frames to this directory")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("catalog", help="export the skill catalog as JSON")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("serve", help="HTTP service for the annotation UI")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--port", type=int, default=8471)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _INPUT_ERRORS as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except _PIPELINE_ERRORS as exc:
        print(f"pipeline failure: {exc}", file=sys.stderr)
        return 3
    except TrampkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
