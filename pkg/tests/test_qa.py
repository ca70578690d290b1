import json

import pytest

from egsmooth import FormatError, Predicate, Resources, SmoothingConfig, contains_predicate
from egsmooth.qa import (
    ContextBand,
    QAExample,
    Statement,
    all_contexts_missing,
    answer_question,
    band_metrics,
    band_partition,
    eligible_context_predicates,
    load_qa,
    parse_bands,
)


def stmt(word: str, arg1="x", arg2="y", types="person#thing", swap_rel=False) -> Statement:
    special = {"pay.for": "(pay.1,pay.for.2)", "shop.for": "(shop.1,shop.for.2)"}
    body = special.get(word, f"({word}.1,{word}.2)")
    if swap_rel:
        inner = body[1:-1].split(",")
        body = f"({inner[1]},{inner[0]})"
        types = "#".join(reversed(types.split("#")))
    from egsmooth import TypeSignature

    return Statement(Predicate.parse(body, TypeSignature.parse(types)), arg1, arg2)


def qex(question, contexts, label=True) -> QAExample:
    return QAExample(question, tuple(contexts), label)


class TestAnswerQuestion:
    def test_direct_context_edge(self, fixture_resources):
        example = qex(stmt("play"), [stmt("beat")])
        assert answer_question(example, fixture_resources, SmoothingConfig()) == 0.9

    def test_entity_mismatch_scores_zero(self, fixture_resources):
        example = qex(stmt("play", "x", "y"), [stmt("beat", "x", "z")])
        assert answer_question(example, fixture_resources, SmoothingConfig()) == 0.0

    def test_reversed_entities_swap_slots(self, fixture_resources):
        # context stored as (y, beaten-by-ish, x): slots swap back to beat(x, y)
        example = qex(stmt("play", "x", "y"), [stmt("beat", "y", "x", swap_rel=True)])
        assert answer_question(example, fixture_resources, SmoothingConfig()) == 0.9

    def test_smoothing_recovers_missing_context(self, fixture_resources):
        example = qex(stmt("play"), [stmt("obliterate")])
        assert answer_question(example, fixture_resources, SmoothingConfig()) == 0.0
        cfg = SmoothingConfig(premise_mode="knn", k_prem=4)
        assert answer_question(example, fixture_resources, cfg) == 0.9

    def test_empty_contexts(self, fixture_resources):
        example = qex(stmt("play"), [])
        assert answer_question(example, fixture_resources, SmoothingConfig()) == 0.0

    def test_matches_brute_force_enumeration(self, fixture_resources):
        from egsmooth import score_query

        cfg = SmoothingConfig(premise_mode="knn", k_prem=4)
        example = qex(
            stmt("play"),
            [stmt("obliterate"), stmt("defeat"), stmt("watch"), stmt("beat", "x", "z")],
        )
        expected = max(
            (
                score_query(p, example.question.predicate, fixture_resources, cfg).score
                for p in eligible_context_predicates(example)
            ),
            default=0.0,
        )
        assert answer_question(example, fixture_resources, cfg) == expected == 0.9


class TestEligibility:
    def test_signature_must_match(self, fixture_resources):
        example = qex(stmt("play"), [Statement(Predicate.parse("(beat.1,beat.2)#person#person"), "x", "y")])
        assert eligible_context_predicates(example) == []

    def test_swapped_predicate_queried_in_graph_form(self, fixture_graph):
        example = qex(stmt("play", "x", "y"), [stmt("beat", "y", "x", swap_rel=True)])
        preds = eligible_context_predicates(example)
        assert len(preds) == 1
        assert preds[0].relation == "(beat.1,beat.2)#person#thing"
        assert contains_predicate(fixture_graph, preds[0])


class TestMissRate:
    def test_all_present(self, fixture_resources):
        example = qex(stmt("play"), [stmt("beat"), stmt("watch")])
        assert not all_contexts_missing(example, fixture_resources)

    def test_all_missing(self, fixture_resources):
        example = qex(stmt("play"), [stmt("obliterate"), stmt("gobsmack")])
        assert all_contexts_missing(example, fixture_resources)

    def test_smoothing_never_increases_missed_zero_answers(self, fixture_resources, data_dir):
        examples = load_qa(data_dir / "fixture_qa.jsonl")
        cfg_off = SmoothingConfig()
        cfg_on = SmoothingConfig(premise_mode="knn", k_prem=4)
        for example in examples[:80]:
            off = answer_question(example, fixture_resources, cfg_off)
            on = answer_question(example, fixture_resources, cfg_on)
            assert on >= off


class TestBands:
    def test_parse_default(self):
        bands = parse_bands([2, 5, 10, 15])
        assert [b.label() for b in bands] == ["[2, 5)", "[5, 10)", "[10, 15)", "15+"]

    def test_band_assignment(self, fixture_resources):
        bands = parse_bands([2, 5, 10, 15])
        seven = qex(stmt("play"), [stmt("beat")] * 7)
        one = qex(stmt("play"), [stmt("beat")])
        fifteen = qex(stmt("play"), [stmt("beat")] * 15)
        partition, dropped = band_partition([seven, one, fifteen], bands)
        assert partition[ContextBand(5, 10)] == [seven]
        assert partition[ContextBand(15, None)] == [fifteen]
        assert dropped == [one]

    def test_partition_is_a_partition(self, data_dir):
        examples = load_qa(data_dir / "fixture_qa.jsonl")
        bands = parse_bands([2, 5, 10, 15])
        partition, dropped = band_partition(examples, bands)
        assert sum(len(v) for v in partition.values()) + len(dropped) == len(examples)
        seen = set()
        for members in partition.values():
            for m in members:
                assert id(m) not in seen
                seen.add(id(m))

    def test_overlapping_bands_rejected(self):
        with pytest.raises(ValueError, match="overlap"):
            band_partition([], [ContextBand(2, 6), ContextBand(5, 10)])

    def test_invalid_band(self):
        with pytest.raises(ValueError):
            ContextBand(5, 5)

    def test_band_metrics_undefined_without_positives(self, fixture_resources):
        bands = parse_bands([2])
        examples = [qex(stmt("play"), [stmt("beat"), stmt("watch")], label=False)]
        partition, _ = band_partition(examples, bands)
        reports = band_metrics(partition, fixture_resources, SmoothingConfig())
        assert reports[0].auc_norm is None


class TestLoadQA:
    def test_fixture_loads(self, data_dir):
        examples = load_qa(data_dir / "fixture_qa.jsonl")
        assert len(examples) == 200
        assert sum(1 for e in examples if e.label) == 100

    def test_bad_label(self, tmp_path):
        path = tmp_path / "qa.jsonl"
        record = {
            "question": {"rel": "(a.1,a.2)", "arg1": "x", "arg2": "y", "types": "p#q"},
            "contexts": [],
            "label": "yes",
        }
        path.write_text(json.dumps(record) + "\n")
        with pytest.raises(FormatError) as exc:
            load_qa(path)
        assert exc.value.line == 1

    def test_empty_file(self, tmp_path):
        path = tmp_path / "qa.jsonl"
        path.write_text("")
        with pytest.raises(FormatError, match="empty"):
            load_qa(path)
