"""Trampoline routine analysis and skill identification."""

from .catalog import SkillRecord, load_catalog, lookup_tariff, parse_code
from .classify import ClassificationResult, ReferenceSet, ReferenceSkill, classify, mse, resample
from .config import PipelineConfig
from .evaluate import ConfusionMatrix, EvalConfig, accuracy, run_evaluation
from .extraction import BackgroundModel, TrampolineLine, set_trampoline_line
from .features import FeatureTrajectory, extract_features
from .pose import PoseSequence, load_pose_sequence, save_pose_sequence, smooth_poses
from .segmentation import BounceSegment, CentroidTrack, find_minima, segment_routine
from .synthgen import NoiseSpec, SkillMotionModel, build_model, builtin_models

__version__ = "0.1.0"

__all__ = [
    "BackgroundModel",
    "BounceSegment",
    "CentroidTrack",
    "ClassificationResult",
    "ConfusionMatrix",
    "EvalConfig",
    "FeatureTrajectory",
    "NoiseSpec",
    "PipelineConfig",
    "PoseSequence",
    "ReferenceSet",
    "ReferenceSkill",
    "SkillMotionModel",
    "SkillRecord",
    "TrampolineLine",
    "accuracy",
    "build_model",
    "builtin_models",
    "classify",
    "extract_features",
    "find_minima",
    "load_catalog",
    "load_pose_sequence",
    "lookup_tariff",
    "mse",
    "parse_code",
    "resample",
    "run_evaluation",
    "save_pose_sequence",
    "segment_routine",
    "set_trampoline_line",
    "smooth_poses",
    "__version__",
]
