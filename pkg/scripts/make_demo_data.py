#!/usr/bin/env python3
"""Build a ready-to-serve demo data directory from a synthetic routine.

Generates a routine, renders it to frames, runs extraction and feature
extraction, and lays everything out the way `trampkit serve` expects:

    <out>/frames/              rendered PNG frames
    <out>/data/routines/r1/    track, segments, crops, features
"""

import argparse
import sys
from pathlib import Path

from trampkit.cli import main as trampkit_main
from trampkit.frameio import write_frame_dir
from trampkit.pipeline import write_json
from trampkit.pose import PoseSequence, save_pose_sequence
from trampkit.synthgen import NoiseSpec, generate_routine, render_routine_frames

LEAD_EMPTY = 12


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", required=True)
    parser.add_argument("--codes", nargs="+",
                        default=["FTF", "FPF", "F1F", "F0S", "S1S", "S0F", "BSSt", "F2F"])
    parser.add_argument("--in-bounces", type=int, default=2)
    parser.add_argument("--seed", type=int, default=5)
    parser.add_argument("--routine-id", default="r1")
    args = parser.parse_args()

    out = Path(args.out)
    frames_dir = out / "frames"
    data_dir = out / "data"
    routine_dir = data_dir / "routines" / args.routine_id

    seq, _, truth = generate_routine(
        args.codes, in_bounces=args.in_bounces,
        noise=NoiseSpec(keypoint_sigma=1.0, seed=args.seed),
    )
    n = write_frame_dir(
        render_routine_frames(seq, lead_empty=LEAD_EMPTY, seed=args.seed + 1), frames_dir
    )
    write_json(frames_dir / "meta.json", {"fps": 30.0})
    print(f"rendered {n} frames")

    rc = trampkit_main(["extract", "--frames", str(frames_dir),
                        "--out", str(routine_dir), "--routine-id", args.routine_id])
    if rc:
        return rc
    # pose stream lives inside the routine dir so the service can serve it
    poses_path = routine_dir / "poses.jsonl"
    save_pose_sequence(
        PoseSequence(frame_indices=seq.frame_indices + LEAD_EMPTY,
                     joints=seq.joints, fps=seq.fps),
        poses_path,
    )
    rc = trampkit_main(["features", "--poses", str(poses_path),
                        "--segments", str(routine_dir / "segments.json"),
                        "--out", str(routine_dir / "features"),
                        "--routine-id", args.routine_id])
    if rc:
        return rc
    print(f"demo data ready; run: trampkit serve --data-dir {data_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
