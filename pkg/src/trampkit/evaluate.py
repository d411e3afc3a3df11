"""Repeated random split evaluation with confusion-matrix reporting.

Each iteration samples a fixed-size subset per skill, splits it into
reference and test halves, classifies every test example against the
pooled references, and accumulates a confusion matrix. Sampling runs on a
fully specified SplitMix64 stream, so a seed pins the whole report.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .classify import ReferenceSet, ReferenceSkill, resample
from .errors import InsufficientExamplesError
from .features import FeatureTrajectory
from .rng import SplitMix64


@dataclass
class EvalConfig:
    references_per_skill: int = 5
    tests_per_skill: int = 5
    subset_size: int = 10
    iterations: int = 20
    min_examples: int = 10
    rng_seed: int = 0

    def __post_init__(self):
        if min(self.references_per_skill, self.tests_per_skill, self.subset_size,
               self.iterations, self.min_examples) <= 0:
            raise ValueError("all evaluation sizes must be positive")
        if self.references_per_skill + self.tests_per_skill > self.subset_size:
            raise ValueError("reference + test split exceeds the subset size")


@dataclass
class ConfusionMatrix:
    labels: list[str]
    counts: np.ndarray  # (N, N) int64; rows = truth, columns = prediction

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        n = len(self.labels)
        if self.counts.shape != (n, n):
            raise ValueError("counts must be square and match labels")
        if (self.counts < 0).any():
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def rates(self) -> np.ndarray:
        """Row-normalised rates; all-zero rows stay zero."""
        sums = self.counts.sum(axis=1, keepdims=True)
        safe = np.where(sums > 0, sums, 1)
        return self.counts / safe


def accuracy(cm: ConfusionMatrix) -> float:
    total = cm.total
    if total <= 0:
        raise ValueError("confusion matrix has no counts")
    return float(np.trace(cm.counts) / total)


def export_confusion(cm: ConfusionMatrix, path) -> tuple[str, str]:
    """Write integer counts CSV plus a row-normalised variant.

    Returns (counts_path, rates_path); the counts file round-trips
    losslessly through read_confusion.
    """
    path = str(path)
    stem, dot, ext = path.rpartition(".")
    rates_path = f"{stem}_rates.{ext}" if dot else f"{path}_rates"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + cm.labels)
        for label, row in zip(cm.labels, cm.counts):
            writer.writerow([label] + [int(v) for v in row])
    rates = cm.rates()
    with open(rates_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + cm.labels)
        for label, row in zip(cm.labels, rates):
            writer.writerow([label] + [repr(float(v)) for v in row])
    return path, rates_path


def read_confusion(path) -> ConfusionMatrix:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    labels = rows[0][1:]
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for i, row in enumerate(rows[1:]):
        counts[i] = [int(v) for v in row[1:]]
    return ConfusionMatrix(labels=labels, counts=counts)


@dataclass
class EvalResult:
    mean_accuracy: float
    per_iteration: list[float]
    confusion: ConfusionMatrix
    config: EvalConfig
    included_codes: list[str] = field(default_factory=list)

    def report_json(self, confusion_csv_path: str | None = None) -> str:
        report = {
            "mean_accuracy": self.mean_accuracy,
            "per_iteration": self.per_iteration,
            "included_codes": self.included_codes,
            "confusion_csv_path": confusion_csv_path,
            "confusion": {
                "labels": self.confusion.labels,
                "counts": [[int(v) for v in row] for row in self.confusion.counts],
            },
            "config": asdict(self.config),
            "protocol": "repeated random subsampling",
        }
        return json.dumps(report, sort_keys=True, indent=2) + "\n"


def run_evaluation(dataset: dict[str, list[FeatureTrajectory]], cfg: EvalConfig) -> EvalResult:
    """Run the repeated random split protocol over a labelled dataset.

    Skills with fewer than `min_examples` examples are excluded up front;
    included skills short of `subset_size` raise. Iterations are seeded
    independently from the root stream, so they could run in parallel
    without changing the result.
    """
    codes = sorted(code for code, items in dataset.items() if len(items) >= cfg.min_examples)
    if not codes:
        raise ValueError("no skill meets the inclusion floor")
    for code in codes:
        if len(dataset[code]) < cfg.subset_size:
            raise InsufficientExamplesError(code, len(dataset[code]), cfg.subset_size)

    root = SplitMix64(cfg.rng_seed)
    iteration_seeds = [root.next_uint64() for _ in range(cfg.iterations)]
    index_of = {code: i for i, code in enumerate(codes)}
    counts = np.zeros((len(codes), len(codes)), dtype=np.int64)
    per_iteration: list[float] = []
    total_correct = 0
    total_tests = 0

    for seed in iteration_seeds:
        rng = SplitMix64(seed)
        ref_entries: list[tuple[str, FeatureTrajectory]] = []
        test_entries: list[tuple[str, FeatureTrajectory]] = []
        for code in codes:
            picks = rng.sample(len(dataset[code]), cfg.subset_size)
            ref_idx = picks[: cfg.references_per_skill]
            test_idx = picks[cfg.references_per_skill: cfg.references_per_skill + cfg.tests_per_skill]
            assert not set(ref_idx) & set(test_idx), "reference/test overlap"
            ref_entries.extend((code, dataset[code][i]) for i in ref_idx)
            test_entries.extend((code, dataset[code][i]) for i in test_idx)

        resample_cache: dict[tuple[int, int], np.ndarray] = {}

        def resampled(j: int, length: int) -> np.ndarray:
            key = (j, length)
            if key not in resample_cache:
                resample_cache[key] = resample(ref_entries[j][1], length).angles
            return resample_cache[key]

        correct = 0
        for truth_code, observed in test_entries:
            T = len(observed)
            stacked = np.stack([resampled(j, T) for j in range(len(ref_entries))])
            diffs = stacked - observed.angles[None]
            errs = np.mean(diffs * diffs, axis=(1, 2))
            best = int(np.argmin(errs))  # first minimum = earliest reference wins ties
            predicted = ref_entries[best][0]
            counts[index_of[truth_code], index_of[predicted]] += 1
            if predicted == truth_code:
                correct += 1
        per_iteration.append(correct / len(test_entries))
        total_correct += correct
        total_tests += len(test_entries)

    return EvalResult(
        mean_accuracy=total_correct / total_tests,
        per_iteration=per_iteration,
        confusion=ConfusionMatrix(labels=codes, counts=counts),
        config=cfg,
        included_codes=codes,
    )


def reference_set_from_dataset(dataset: dict[str, list[FeatureTrajectory]]) -> ReferenceSet:
    """Build a reference set with every example, in sorted code order."""
    refset = ReferenceSet()
    for code in sorted(dataset):
        for traj in dataset[code]:
            refset.add(ReferenceSkill(code=code, trajectory=traj))
    return refset
