"""Metric tests. The reference implementations here recount confusion
matrices from scratch with plain loops so that the vectorized library code
is checked against an independent path."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from egsmooth import FormatError, MetricsError, Predicate, SmoothingConfig, TypeSignature
from egsmooth.evaluate import (
    Dataset,
    EntailmentExample,
    PRCurve,
    PRPoint,
    auc_norm,
    average_precision,
    compute_metrics,
    load_dataset,
    pr_curve,
    score_dataset,
)


def ex(label: bool) -> EntailmentExample:
    sig = TypeSignature("person", "thing")
    return EntailmentExample(
        Predicate.parse("(a.1,a.2)", sig), Predicate.parse("(b.1,b.2)", sig), label
    )


def scored(pos, neg):
    return [(ex(True), s) for s in pos] + [(ex(False), s) for s in neg]


# ---------------------------------------------------------------------------
# Reference implementations (loops, no numpy)
# ---------------------------------------------------------------------------


def ref_curve(pairs):
    thresholds = sorted({s for lab, s in pairs if lab and s > 0}, reverse=True)
    n_pos = sum(1 for lab, _ in pairs if lab)
    points = []
    for t in thresholds:
        tp = sum(1 for lab, s in pairs if lab and s >= t)
        predicted = sum(1 for _, s in pairs if s >= t)
        points.append((tp / n_pos, tp / predicted, t))
    return points


def ref_auc_norm(points, baseline):
    if not points:
        return 0.0
    rs = [0.0] + [r for r, _, _ in points]
    ps = [points[0][1]] + [p for _, p, _ in points]
    area = 0.0
    for i in range(len(rs) - 1):
        e0 = max(ps[i] - baseline, 0.0)
        e1 = max(ps[i + 1] - baseline, 0.0)
        area += (rs[i + 1] - rs[i]) * (e0 + e1) / 2.0
    return area / (1.0 - baseline)


def ref_ap(pairs):
    n_pos = sum(1 for lab, _ in pairs if lab)
    thresholds = sorted({s for _, s in pairs if s > 0}, reverse=True)
    total = 0.0
    tp_prev = 0
    for t in thresholds:
        tp = sum(1 for lab, s in pairs if lab and s >= t)
        predicted = sum(1 for _, s in pairs if s >= t)
        if tp > tp_prev:
            total += (tp - tp_prev) * tp / predicted
        tp_prev = tp
    return total / n_pos


# ---------------------------------------------------------------------------
# Hand-computed examples
# ---------------------------------------------------------------------------


class TestPRCurve:
    def test_two_points(self):
        curve = pr_curve(scored([0.9, 0.8], [0.7, 0.1]))
        assert [(p.recall, p.precision, p.threshold) for p in curve.points] == [
            (0.5, 1.0, 0.9),
            (1.0, 1.0, 0.8),
        ]

    def test_perfect_separation(self):
        curve = pr_curve(scored([0.9, 0.8, 0.7], [0.2, 0.1, 0.05]))
        assert all(p.precision == 1.0 for p in curve.points)

    def test_all_zero_scores(self):
        curve = pr_curve(scored([0.0, 0.0], [0.0, 0.0]))
        assert curve.points == []
        assert curve.max_recall == 0.0

    def test_zero_score_examples_never_predicted(self):
        # a zero-scored negative must not hurt precision at any threshold
        curve = pr_curve(scored([0.5], [0.0, 0.0, 0.0]))
        assert [(p.recall, p.precision) for p in curve.points] == [(1.0, 1.0)]

    def test_no_positives_is_an_error(self):
        with pytest.raises(MetricsError):
            pr_curve(scored([], [0.5, 0.2]))

    def test_recall_non_decreasing(self):
        curve = pr_curve(scored([0.9, 0.5, 0.5, 0.1], [0.7, 0.5, 0.3]))
        recalls = [p.recall for p in curve.points]
        assert recalls == sorted(recalls)


class TestAucNorm:
    def test_perfect_classifier(self):
        curve = PRCurve([PRPoint(0.0, 1.0, 1.0), PRPoint(1.0, 1.0, 0.5)])
        assert auc_norm(curve, 0.5) == 1.0

    def test_baseline_classifier(self):
        curve = PRCurve([PRPoint(0.0, 0.5, 1.0), PRPoint(1.0, 0.5, 0.5)])
        assert auc_norm(curve, 0.5) == 0.0

    def test_two_segment_hand_integration(self):
        # precision 1.0 over recall [0, 0.5], 0.75 over [0.5, 1.0]:
        # (0.5*0.5 + 0.25*0.5) / 0.5 = 0.75
        curve = PRCurve(
            [
                PRPoint(0.0, 1.0, 0.9),
                PRPoint(0.5, 1.0, 0.8),
                PRPoint(0.5, 0.75, 0.7),
                PRPoint(1.0, 0.75, 0.6),
            ]
        )
        assert auc_norm(curve, 0.5) == pytest.approx(0.75, abs=1e-12)

    def test_empty_curve(self):
        assert auc_norm(PRCurve([]), 0.5) == 0.0

    def test_bad_baseline(self):
        with pytest.raises(MetricsError):
            auc_norm(PRCurve([]), 1.0)

    def test_end_to_end_perfect_classifier_scores_one(self):
        report = compute_metrics(scored([0.9, 0.8, 0.7], [0.3, 0.2, 0.1]))
        assert report.auc_norm == 1.0

    def test_never_above_baseline_scores_zero(self):
        # every threshold mixes one positive with one higher negative
        report = compute_metrics(scored([0.8, 0.4], [0.9, 0.5]))
        assert report.auc_norm == 0.0


class TestAveragePrecision:
    def test_perfect_ranking(self):
        assert average_precision(scored([0.9, 0.8], [0.2, 0.1])) == 1.0

    def test_interleaved_ranking(self):
        # [pos, neg, pos, neg] -> (1/1 + 2/3) / 2
        assert average_precision(scored([0.9, 0.5], [0.7, 0.3])) == pytest.approx(
            (1.0 + 2.0 / 3.0) / 2.0, abs=1e-12
        )

    def test_all_positives_unscored(self):
        assert average_precision(scored([0.0, 0.0], [0.0])) == 0.0

    def test_tied_scores_bucketed(self):
        # one positive and one negative tied at 0.5 enter together
        value = average_precision(scored([0.9, 0.5], [0.5]))
        assert value == pytest.approx((1.0 + 2.0 / 3.0) / 2.0, abs=1e-12)


# ---------------------------------------------------------------------------
# Oracle equivalence on random scored datasets
# ---------------------------------------------------------------------------


def random_pairs(rng):
    n = int(rng.integers(2, 51))
    labels = rng.random(n) < rng.uniform(0.2, 0.8)
    if not labels.any():
        labels[int(rng.integers(0, n))] = True
    if rng.random() < 0.5:
        scores = rng.choice([0.0, 0.1, 0.2, 0.3, 0.4, 0.5], size=n)  # force ties
    else:
        scores = np.where(rng.random(n) < 0.3, 0.0, rng.random(n))
    return [(bool(l), float(s)) for l, s in zip(labels, scores)]


def test_oracle_equivalence_random_datasets():
    rng = np.random.default_rng(2024)
    for _ in range(300):
        pairs = random_pairs(rng)
        examples = [(ex(lab), s) for lab, s in pairs]
        curve = pr_curve(examples)
        assert [(p.recall, p.precision, p.threshold) for p in curve.points] == ref_curve(pairs)
        baseline = sum(1 for lab, _ in pairs if lab) / len(pairs)
        if 0.0 < baseline < 1.0:
            assert auc_norm(curve, baseline) == pytest.approx(
                ref_auc_norm(ref_curve(pairs), baseline), abs=1e-9
            )
        assert average_precision(examples) == pytest.approx(ref_ap(pairs), abs=1e-9)


# ---------------------------------------------------------------------------
# Properties
# ---------------------------------------------------------------------------


@st.composite
def scored_sets(draw):
    n = draw(st.integers(2, 30))
    labels = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    if not any(labels):
        labels[0] = True
    scores = draw(
        st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.75, 0.9]), min_size=n, max_size=n)
    )
    return [(lab, s) for lab, s in zip(labels, scores)]


class TestProperties:
    @settings(max_examples=80, deadline=None)
    @given(scored_sets(), st.sampled_from(["double", "sqrt", "affine"]))
    def test_monotone_transform_invariance(self, pairs, transform):
        # strictly increasing, zero-preserving transforms keep the curve,
        # AUC_n, and AP unchanged (0 stays "unanswerable")
        fn = {
            "double": lambda s: 2.0 * s,
            "sqrt": lambda s: s**0.5,
            "affine": lambda s: s / (1.0 + s),
        }[transform]
        base = [(ex(lab), s) for lab, s in pairs]
        moved = [(ex(lab), fn(s)) for lab, s in pairs]
        c0, c1 = pr_curve(base), pr_curve(moved)
        assert [(p.recall, p.precision) for p in c0.points] == [
            (p.recall, p.precision) for p in c1.points
        ]
        assert average_precision(base) == pytest.approx(average_precision(moved), abs=1e-12)
        if 0 < sum(1 for lab, _ in pairs if lab) < len(pairs):
            baseline = sum(1 for lab, _ in pairs if lab) / len(pairs)
            assert auc_norm(c0, baseline) == pytest.approx(auc_norm(c1, baseline), abs=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(scored_sets())
    def test_auc_norm_bounded(self, pairs):
        n_pos = sum(1 for lab, _ in pairs if lab)
        if not (0 < n_pos < len(pairs)):
            return
        curve = pr_curve([(ex(lab), s) for lab, s in pairs])
        baseline = n_pos / len(pairs)
        value = auc_norm(curve, baseline)
        assert 0.0 <= value <= 1.0
        if all(p.precision <= baseline for p in curve.points):
            assert value == 0.0


# ---------------------------------------------------------------------------
# Dataset loading and scoring
# ---------------------------------------------------------------------------


class TestLoadDataset:
    def test_fixture_balanced(self, data_dir):
        ds = load_dataset(data_dir / "fixture_dataset.tsv")
        assert len(ds) == 12
        assert ds.positive_rate == 0.5

    def test_bad_label(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("(a.1,a.2)\t(b.1,b.2)\tx#y\tmaybe\n")
        with pytest.raises(FormatError) as exc:
            load_dataset(path)
        assert exc.value.line == 1

    def test_duplicates_retained(self, tmp_path):
        line = "(a.1,a.2)\t(b.1,b.2)\tx#y\tTrue\n"
        path = tmp_path / "d.tsv"
        path.write_text(line + line)
        assert len(load_dataset(path)) == 2

    def test_empty(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("\n")
        with pytest.raises(FormatError, match="empty"):
            load_dataset(path)

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("(a.1,a.2)\t(b.1,b.2)\tx#y\n")
        with pytest.raises(FormatError, match="4 tab-separated"):
            load_dataset(path)


class TestScoreDataset:
    def test_smoothing_off_all_missing(self, fixture_resources, tmp_path):
        rows = [
            "(ghost.1,ghost.2)\t(play.1,play.2)\tperson#thing\tTrue",
            "(wraith.1,wraith.2)\t(play.1,play.2)\tperson#thing\tFalse",
        ]
        path = tmp_path / "d.tsv"
        path.write_text("\n".join(rows) + "\n")
        ds = load_dataset(path)
        out = score_dataset(ds, fixture_resources, SmoothingConfig())
        assert [s for _, s in out] == [0.0, 0.0]

    def test_direct_edges_score_edge_weights(self, fixture_resources, data_dir):
        ds = load_dataset(data_dir / "fixture_dataset.tsv")
        out = score_dataset(ds, fixture_resources, SmoothingConfig())
        assert out[0][1] == 0.9 and out[1][1] == 0.8

    def test_ordering_matches_input(self, fixture_resources, data_dir):
        ds = load_dataset(data_dir / "fixture_dataset.tsv")
        out = score_dataset(ds, fixture_resources, SmoothingConfig())
        assert [e for e, _ in out] == ds.examples

    def test_smoothing_recall_monotone(self, fixture_resources, data_dir):
        ds = load_dataset(data_dir / "fixture_dataset.tsv")
        off = compute_metrics(score_dataset(ds, fixture_resources, SmoothingConfig()))
        on = compute_metrics(
            score_dataset(ds, fixture_resources, SmoothingConfig(premise_mode="knn"))
        )
        assert on.max_recall >= off.max_recall
