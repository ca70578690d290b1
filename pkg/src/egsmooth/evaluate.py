"""Score directional entailment datasets and compute ranking metrics.

Metric conventions, pinned here because reported numbers depend on them:

* PR curve: one point per distinct score of a positive-labeled example
  (zero scores excluded). At threshold t, everything scoring >= t is
  predicted positive; examples scoring 0 are never predicted positive at
  any threshold, which is what caps maximum recall for symbolic models.
  Tied scores enter and leave the predicted set together.
* AUC_n: the area between the precision curve and the random-guess
  baseline (negative excess clipped to 0), integrated trapezoidally over
  recall and divided by (1 - baseline) so a perfect classifier scores 1.
  The curve is extended flat to recall 0 at its first precision; there is
  no extrapolation beyond observed recall on the right, so models that
  answer fewer queries earn less area.
* AP: sum over ranked positives of precision at that rank divided by the
  positive count, with threshold (bucketed) tie handling; positives
  scoring 0 contribute nothing.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import FormatError, MetricsError
from .graph import Predicate, TypeSignature
from .smoother import Resources, SmoothingConfig, score_query


@dataclass(frozen=True)
class EntailmentExample:
    premise: Predicate
    hypothesis: Predicate
    label: bool


@dataclass
class Dataset:
    examples: list[EntailmentExample]

    @property
    def positive_rate(self) -> float:
        return sum(1 for e in self.examples if e.label) / len(self.examples)

    def __len__(self) -> int:
        return len(self.examples)


@dataclass(frozen=True)
class PRPoint:
    recall: float
    precision: float
    threshold: float


@dataclass
class PRCurve:
    points: list[PRPoint]

    @property
    def max_recall(self) -> float:
        return self.points[-1].recall if self.points else 0.0


@dataclass
class MetricsReport:
    auc_norm: float
    average_precision: float
    max_recall: float
    curve: PRCurve
    n_examples: int
    positive_rate: float


def parse_example(premise: str, hypothesis: str, type_pair: str, label: str) -> EntailmentExample:
    signature = TypeSignature.parse(type_pair)
    p = Predicate.parse(premise, signature)
    h = Predicate.parse(hypothesis, signature)
    if label not in ("True", "False"):
        raise ValueError(f"label must be 'True' or 'False', got {label!r}")
    return EntailmentExample(p, h, label == "True")


def load_dataset(path: str | Path) -> Dataset:
    """Load the 4-column TSV: premise, hypothesis, left#right, True|False.

    Relation columns may carry their own #type suffixes (they must then
    agree with the type column) or be bare (a.1,b.2) forms.
    """
    path = Path(path)
    examples: list[EntailmentExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise FormatError(f"expected 4 tab-separated columns, got {len(cols)}",
                                  path=str(path), line=lineno)
            try:
                examples.append(parse_example(*cols))
            except Exception as e:
                raise FormatError(str(e), path=str(path), line=lineno) from e
    if not examples:
        raise FormatError("dataset is empty", path=str(path))
    return Dataset(examples)


def score_dataset(
    dataset: Dataset,
    res: Resources,
    config: SmoothingConfig,
) -> list[tuple[EntailmentExample, float]]:
    """One smoother verdict score per example, in input order."""
    return [(ex, score_query(ex.premise, ex.hypothesis, res, config).score) for ex in dataset.examples]


# ---------------------------------------------------------------------------
# Metrics
# ---------------------------------------------------------------------------


def _arrays(scored: Sequence[tuple[EntailmentExample, float]]) -> tuple[np.ndarray, np.ndarray]:
    labels = np.array([ex.label for ex, _ in scored], dtype=bool)
    scores = np.array([s for _, s in scored], dtype=np.float64)
    return labels, scores


def curve_from_arrays(labels: np.ndarray, scores: np.ndarray) -> PRCurve:
    if not labels.any():
        raise MetricsError("PR curve needs at least one positive-labeled example")
    thresholds = np.unique(scores[labels & (scores > 0)])[::-1]
    n_pos = int(labels.sum())
    points = []
    for t in thresholds:
        predicted = scores >= t
        tp = int((predicted & labels).sum())
        points.append(PRPoint(tp / n_pos, tp / int(predicted.sum()), float(t)))
    return PRCurve(points)


def pr_curve(scored: Sequence[tuple[EntailmentExample, float]]) -> PRCurve:
    labels, scores = _arrays(scored)
    return curve_from_arrays(labels, scores)


def auc_norm(curve: PRCurve, baseline: float) -> float:
    """Normalized area above the baseline; 0 for an empty curve."""
    if not (0.0 < baseline < 1.0):
        raise MetricsError(f"baseline must be in (0, 1), got {baseline}")
    if not curve.points:
        return 0.0
    recalls = np.array([0.0] + [p.recall for p in curve.points])
    excess = np.array(
        [max(curve.points[0].precision - baseline, 0.0)]
        + [max(p.precision - baseline, 0.0) for p in curve.points]
    )
    area = float(np.trapezoid(excess, recalls))
    return area / (1.0 - baseline)


def ap_from_arrays(labels: np.ndarray, scores: np.ndarray) -> float:
    if not labels.any():
        raise MetricsError("average precision needs at least one positive-labeled example")
    n_pos = int(labels.sum())
    thresholds = np.unique(scores[scores > 0])[::-1]
    total = 0.0
    tp_prev = 0
    for t in thresholds:
        predicted = scores >= t
        tp = int((predicted & labels).sum())
        if tp > tp_prev:
            total += (tp - tp_prev) * (tp / int(predicted.sum()))
        tp_prev = tp
    return total / n_pos


def average_precision(scored: Sequence[tuple[EntailmentExample, float]]) -> float:
    labels, scores = _arrays(scored)
    return ap_from_arrays(labels, scores)


def metrics_from_arrays(
    labels: np.ndarray,
    scores: np.ndarray,
    baseline: float | None = None,
) -> MetricsReport:
    if baseline is None:
        baseline = float(labels.mean())
    curve = curve_from_arrays(labels, scores)
    return MetricsReport(
        auc_norm=auc_norm(curve, baseline),
        average_precision=ap_from_arrays(labels, scores),
        max_recall=curve.max_recall,
        curve=curve,
        n_examples=int(labels.size),
        positive_rate=float(labels.mean()),
    )


def compute_metrics(
    scored: Sequence[tuple[EntailmentExample, float]],
    baseline: float | None = None,
) -> MetricsReport:
    """Full report; the baseline defaults to the dataset positive rate."""
    labels, scores = _arrays(scored)
    return metrics_from_arrays(labels, scores, baseline)


def write_curve_csv(curve: PRCurve, path: str | Path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["threshold", "recall", "precision"])
        for point in curve.points:
            writer.writerow([repr(point.threshold), repr(point.recall), repr(point.precision)])


def report_as_dict(report: MetricsReport) -> dict:
    return {
        "n_examples": report.n_examples,
        "positive_rate": report.positive_rate,
        "max_recall": report.max_recall,
        "auc_norm": report.auc_norm,
        "average_precision": report.average_precision,
        "n_curve_points": len(report.curve.points),
    }
