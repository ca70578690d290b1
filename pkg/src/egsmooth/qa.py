"""Boolean open-domain QA over entailment graphs.

Each question is a typed (entity, relation, entity) triple judged true or
false; context statements are other triples about the same entities. A
question is answered by the best entailment score from any eligible
context relation to the question relation. Questions are bucketed by how
many context statements they have, since sparse-context questions are the
ones where missing predicates hurt most.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import FormatError, MetricsError
from .evaluate import MetricsReport, metrics_from_arrays
from .graph import Predicate, TypeSignature, contains_predicate
from .smoother import Resources, SmoothingConfig, score_query


@dataclass(frozen=True)
class Statement:
    predicate: Predicate
    arg1: str
    arg2: str


@dataclass(frozen=True)
class QAExample:
    question: Statement
    contexts: tuple[Statement, ...]
    label: bool


@dataclass(frozen=True)
class ContextBand:
    lower: int
    upper: int | None  # exclusive; None = unbounded

    def __post_init__(self):
        if self.upper is not None and self.lower >= self.upper:
            raise ValueError(f"band lower {self.lower} must be < upper {self.upper}")

    def contains(self, n: int) -> bool:
        return n >= self.lower and (self.upper is None or n < self.upper)

    def label(self) -> str:
        return f"[{self.lower}, {self.upper})" if self.upper is not None else f"{self.lower}+"


@dataclass
class BandReport:
    band: ContextBand
    n_questions: int
    auc_norm: float | None  # None when undefined (single-class band)
    miss_rate: float


DEFAULT_BAND_EDGES = (2, 5, 10, 15)


def parse_bands(edges: Sequence[int]) -> list[ContextBand]:
    """Edges like (2, 5, 10, 15) give [2,5), [5,10), [10,15), 15+."""
    if not edges:
        raise ValueError("need at least one band edge")
    edges = list(edges)
    if sorted(set(edges)) != edges:
        raise ValueError(f"band edges must be strictly increasing, got {edges}")
    bands = [ContextBand(lo, hi) for lo, hi in zip(edges, edges[1:])]
    bands.append(ContextBand(edges[-1], None))
    return bands


def _parse_statement(obj: dict) -> Statement:
    signature = TypeSignature.parse(str(obj["types"]))
    predicate = Predicate.parse(str(obj["rel"]), signature)
    return Statement(predicate, str(obj["arg1"]), str(obj["arg2"]))


def load_qa(path: str | Path) -> list[QAExample]:
    """Load QA JSON lines: {"question": {...}, "contexts": [...], "label": bool}
    where each statement is {"rel", "arg1", "arg2", "types"}."""
    path = Path(path)
    examples: list[QAExample] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                question = _parse_statement(record["question"])
                contexts = tuple(_parse_statement(c) for c in record["contexts"])
                label = record["label"]
                if not isinstance(label, bool):
                    raise ValueError(f"label must be true/false, got {label!r}")
            except (json.JSONDecodeError, ValueError, KeyError, TypeError) as e:
                raise FormatError(str(e), path=str(path), line=lineno) from e
            examples.append(QAExample(question, contexts, label))
    if not examples:
        raise FormatError("QA file is empty", path=str(path))
    return examples


def eligible_context_predicates(example: QAExample) -> list[Predicate]:
    """Context relations usable as premises for this question.

    A context is eligible when its entity pair matches the question's pair
    in order, or reversed (in which case the relation's argument slots are
    swapped), and the resulting predicate carries the question's type
    signature.
    """
    q = example.question
    out: list[Predicate] = []
    for ctx in example.contexts:
        if ctx.arg1 == q.arg1 and ctx.arg2 == q.arg2:
            candidate = ctx.predicate
        elif ctx.arg1 == q.arg2 and ctx.arg2 == q.arg1:
            candidate = ctx.predicate.swapped()
        else:
            continue
        if candidate.signature == q.predicate.signature:
            out.append(candidate)
    return out


def answer_question(example: QAExample, res: Resources, config: SmoothingConfig) -> float:
    """Maximum smoother score from any eligible context relation to the
    question relation; 0 when no context is eligible."""
    best = 0.0
    for premise in eligible_context_predicates(example):
        verdict = score_query(premise, example.question.predicate, res, config)
        if verdict.score > best:
            best = verdict.score
    return best


def all_contexts_missing(example: QAExample, res: Resources) -> bool:
    """True when no eligible context relation is a graph vertex (vacuously
    true for questions with no eligible context)."""
    return all(
        not contains_predicate(res.graph, p) for p in eligible_context_predicates(example)
    )


def band_partition(
    examples: Sequence[QAExample],
    bands: Sequence[ContextBand],
) -> tuple[dict[ContextBand, list[QAExample]], list[QAExample]]:
    """Assign each example to the band holding its context count.

    Returns (partition, dropped); examples outside every band are dropped.
    Overlapping bands are rejected.
    """
    for i, a in enumerate(bands):
        for b in bands[i + 1 :]:
            hi_a = a.upper if a.upper is not None else float("inf")
            hi_b = b.upper if b.upper is not None else float("inf")
            if a.lower < hi_b and b.lower < hi_a:
                raise ValueError(f"bands {a.label()} and {b.label()} overlap")
    partition: dict[ContextBand, list[QAExample]] = {band: [] for band in bands}
    dropped: list[QAExample] = []
    for ex in examples:
        n = len(ex.contexts)
        for band in bands:
            if band.contains(n):
                partition[band].append(ex)
                break
        else:
            dropped.append(ex)
    return partition, dropped


def band_metrics(
    partition: dict[ContextBand, list[QAExample]],
    res: Resources,
    config: SmoothingConfig,
) -> list[BandReport]:
    """Per-band AUC_n over answer scores vs labels, plus the miss rate."""
    reports = []
    for band in sorted(partition, key=lambda b: b.lower):
        examples = partition[band]
        if not examples:
            continue
        labels = np.array([ex.label for ex in examples], dtype=bool)
        scores = np.array([answer_question(ex, res, config) for ex in examples])
        missing = sum(1 for ex in examples if all_contexts_missing(ex, res))
        if labels.all() or not labels.any():
            auc = None  # single-class band: AUC_n undefined
        else:
            auc = metrics_from_arrays(labels, scores).auc_norm
        reports.append(BandReport(band, len(examples), auc, missing / len(examples)))
    return reports


def overall_report(
    examples: Sequence[QAExample],
    res: Resources,
    config: SmoothingConfig,
) -> MetricsReport | None:
    labels = np.array([ex.label for ex in examples], dtype=bool)
    if labels.all() or not labels.any():
        return None
    scores = np.array([answer_question(ex, res, config) for ex in examples])
    return metrics_from_arrays(labels, scores)


def write_band_csv(reports: Sequence[BandReport], path: str | Path) -> None:
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["band", "lower", "upper", "n_questions", "auc_norm", "miss_rate"])
        for r in reports:
            writer.writerow(
                [
                    r.band.label(),
                    r.band.lower,
                    "" if r.band.upper is None else r.band.upper,
                    r.n_questions,
                    "" if r.auc_norm is None else repr(r.auc_norm),
                    repr(r.miss_rate),
                ]
            )
