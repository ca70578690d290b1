import numpy as np
import pytest

from egem_extract import ExtractionJob, read_egem, run_job, write_egem
from egem_extract.cli import main

TABLE_PREDICATES = [
    "(join.1,join.2)#person#organization",
    "(give.2,give.to.2)#medicine#person",
    "(export.1,export.to.2)#location_1#location_2",
]


def run(tiny_model, predicates, out, **kwargs):
    job = ExtractionJob(predicates=predicates, model=tiny_model, out_path=str(out), **kwargs)
    return run_job(job)


class TestAlignment:
    def test_only_predicate_subwords_pooled(self, tiny_model, tmp_path):
        _, audits = run(tiny_model, TABLE_PREDICATES, tmp_path / "v.egm")
        assert len(audits) == 3
        for audit in audits:
            assert audit.pooled, audit.relation
            for _tok, _text, (start, end) in audit.pooled:
                inside = any(
                    max(a, start) < min(b, end) for a, b in audit.predicate_char_spans
                )
                assert inside, f"token span ({start},{end}) outside predicate words"

    def test_single_word_predicate_pools_one_word(self, tiny_model, tmp_path):
        _, audits = run(tiny_model, ["(join.1,join.2)#person#organization"], tmp_path / "v.egm")
        assert [text for _, text, _ in audits[0].pooled] == ["join"]

    def test_multiword_predicate_pools_both_words(self, tiny_model, tmp_path):
        _, audits = run(tiny_model, ["(export.1,export.to.2)#location#location"], tmp_path / "v.egm")
        assert [text for _, text, _ in audits[0].pooled] == ["export", "to"]

    def test_unknown_word_decomposes_without_failing(self, tiny_model, tmp_path):
        vectors, audits = run(tiny_model, ["(flummox.1,flummox.2)#person#thing"], tmp_path / "v.egm")
        assert len(vectors) == 1
        # every pooled subword sits inside the predicate word's span
        assert all(start >= 7 for _, _, (start, _) in audits[0].pooled)


class TestDeterminism:
    def test_identical_predicate_encoded_once_and_identically(self, tiny_model, tmp_path):
        vectors, _ = run(
            tiny_model, TABLE_PREDICATES + TABLE_PREDICATES[:1], tmp_path / "v.egm"
        )
        assert len(vectors) == 3

    def test_two_runs_bitwise_identical(self, tiny_model, tmp_path):
        v1, _ = run(tiny_model, TABLE_PREDICATES, tmp_path / "a.egm", batch_size=2)
        v2, _ = run(tiny_model, TABLE_PREDICATES, tmp_path / "b.egm", batch_size=2)
        for rel in v1:
            np.testing.assert_array_equal(v1[rel], v2[rel])

    def test_vector_independent_of_batch_companions(self, tiny_model, tmp_path):
        # deduped, sorted batching: the same predicate list in any order
        # produces the same file
        v1, _ = run(tiny_model, TABLE_PREDICATES, tmp_path / "a.egm", batch_size=1)
        v2, _ = run(tiny_model, list(reversed(TABLE_PREDICATES)), tmp_path / "b.egm", batch_size=3)
        write_egem(v1, 32, tmp_path / "a.egm")
        write_egem(v2, 32, tmp_path / "b.egm")
        assert (tmp_path / "a.egm").read_bytes() == (tmp_path / "b.egm").read_bytes()


class TestJobValidation:
    def test_bad_batch_size(self):
        with pytest.raises(ValueError):
            ExtractionJob(predicates=[], model="m", out_path="o", batch_size=0)

    def test_bad_layer(self):
        with pytest.raises(ValueError):
            ExtractionJob(predicates=[], model="m", out_path="o", layer="middle")

    def test_unparsable_predicate_skipped(self, tiny_model, tmp_path):
        vectors, _ = run(
            tiny_model, ["garbage", "(join.1,join.2)#person#organization"], tmp_path / "v.egm"
        )
        assert len(vectors) == 1


class TestCli:
    def test_graph_extraction_loads_back(self, tiny_model, tmp_path, data_dir):
        out = tmp_path / "vectors.egm"
        code = main([
            "--graph", str(data_dir / "smoke_graph.jsonl"),
            "--model", tiny_model,
            "--out", str(out),
            "--batch", "4",
        ])
        assert code == 0
        dim, vectors = read_egem(out)
        assert dim == 32
        # every graph predicate, including edge targets, got a vector
        assert "(beat.1,beat.2)#person#thing" in vectors
        assert "(play.1,play.2)#person#thing" in vectors
        assert all(np.isfinite(v).all() for v in vectors.values())

    def test_two_cli_runs_identical_files(self, tiny_model, tmp_path, data_dir):
        outs = []
        for name in ("a.egm", "b.egm"):
            out = tmp_path / name
            assert main([
                "--graph", str(data_dir / "smoke_graph.jsonl"),
                "--model", tiny_model, "--out", str(out),
            ]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_extra_predicates_flag(self, tiny_model, tmp_path, data_dir):
        extra = tmp_path / "extra.txt"
        extra.write_text("(obliterate.1,obliterate.2)#person#thing\n")
        out = tmp_path / "vectors.egm"
        assert main([
            "--graph", str(data_dir / "smoke_graph.jsonl"),
            "--model", tiny_model, "--out", str(out),
            "--predicates", str(extra),
        ]) == 0
        _, vectors = read_egem(out)
        assert "(obliterate.1,obliterate.2)#person#thing" in vectors

    def test_missing_graph_is_error(self, tiny_model, tmp_path):
        assert main([
            "--graph", str(tmp_path / "none.jsonl"),
            "--model", tiny_model, "--out", str(tmp_path / "v.egm"),
        ]) == 2
