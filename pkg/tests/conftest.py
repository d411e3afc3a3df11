import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from trampkit.frameio import write_frame_dir
from trampkit.pipeline import write_json
from trampkit.pose import PoseSequence, save_pose_sequence
from trampkit.synthgen import NoiseSpec, generate_routine, render_routine_frames

LEAD_EMPTY = 12
ROUTINE_CODES = ["FTF", "F0S", "S0F"]


@pytest.fixture(scope="session")
def rendered_routine(tmp_path_factory):
    """A small rendered routine: frames on disk plus aligned pose stream.

    Frame indices in the rendered directory are offset by LEAD_EMPTY
    background-only warmup frames; the pose stream is shifted to match.
    """
    root = tmp_path_factory.mktemp("routine")
    seq, track, truth = generate_routine(
        ROUTINE_CODES,
        in_bounces=2,
        out_bounce=True,
        noise=NoiseSpec(keypoint_sigma=1.0, seed=3),
    )
    frames_dir = root / "frames"
    n = write_frame_dir(
        render_routine_frames(seq, width=896, height=504, line_row=400,
                              lead_empty=LEAD_EMPTY, seed=7),
        frames_dir,
    )
    write_json(frames_dir / "meta.json", {"fps": 30.0})
    shifted = PoseSequence(
        frame_indices=seq.frame_indices + LEAD_EMPTY,
        joints=seq.joints.copy(),
        fps=seq.fps,
    )
    poses_path = root / "poses.jsonl"
    save_pose_sequence(shifted, poses_path)
    return {
        "root": root,
        "frames_dir": frames_dir,
        "poses": poses_path,
        "truth": truth,
        "lead": LEAD_EMPTY,
        "n_frames": n,
        "codes": ROUTINE_CODES,
    }
