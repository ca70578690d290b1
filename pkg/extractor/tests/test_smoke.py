"""End-to-end: extract embeddings with the tiny masked LM, then drive the
graph toolkit's CLI (index + eval) over the produced EGEM file. Scores are
model-dependent, so assertions stop at pipeline health and recall being
nonzero."""

import json
import subprocess
import sys

import pytest

from egem_extract.cli import main as extract_main


@pytest.fixture(scope="module")
def egem_file(tmp_path_factory, data_dir, tiny_model):
    out = tmp_path_factory.mktemp("smoke") / "vectors.egm"
    code = extract_main([
        "--graph", str(data_dir / "smoke_graph.jsonl"),
        "--model", tiny_model,
        "--out", str(out),
        "--predicates", str(data_dir / "smoke_extra_predicates.txt"),
    ])
    assert code == 0
    return out


def egsmooth(*args):
    return subprocess.run(
        [sys.executable, "-m", "egsmooth.cli", *args],
        capture_output=True,
        text=True,
    )


def test_index_command_accepts_extracted_file(egem_file, data_dir, tmp_path):
    result = egsmooth(
        "index",
        "--graph", str(data_dir / "smoke_graph.jsonl"),
        "--embeddings", str(egem_file),
        "--out", str(tmp_path / "bundle"),
    )
    assert result.returncode == 0, result.stderr
    manifest = json.loads((tmp_path / "bundle" / "bundle.json").read_text())
    assert manifest["subgraphs"][0]["n_vectors"] == 4  # 3 declared + 1 edge target


def test_eval_pipeline_has_nonzero_recall(egem_file, data_dir, tmp_path):
    result = egsmooth(
        "eval",
        "--graph", str(data_dir / "smoke_graph.jsonl"),
        "--embeddings", str(egem_file),
        "--dataset", str(data_dir / "smoke_dataset.tsv"),
        "--p-mode", "knn",
        "--out", str(tmp_path / "out"),
    )
    assert result.returncode == 0, result.stderr
    metrics = json.loads((tmp_path / "out" / "metrics.json").read_text())
    assert metrics["max_recall"] > 0.0
    # the missing premise's vector is in the store and K=4 covers the whole
    # 4-vertex vocabulary, so smoothing answers both positives
    assert metrics["max_recall"] == 1.0


def test_template_predicates_load_in_graph_toolkit(tiny_model, tmp_path):
    # the three canonical template forms, one typed subgraph each
    import json

    graph = tmp_path / "templates.jsonl"
    with open(graph, "w", encoding="utf-8") as fh:
        for types, rel in [
            (["person", "organization"], "(join.1,join.2)#person#organization"),
            (["medicine", "person"], "(give.2,give.to.2)#medicine#person"),
            (["location", "location"], "(export.1,export.to.2)#location_1#location_2"),
        ]:
            fh.write(json.dumps({"types": types, "pred": rel, "entails": []}) + "\n")
    egem = tmp_path / "templates.egm"
    assert extract_main(["--graph", str(graph), "--model", tiny_model, "--out", str(egem)]) == 0

    result = egsmooth("index", "--graph", str(graph), "--embeddings", str(egem),
                      "--out", str(tmp_path / "bundle"))
    assert result.returncode == 0, result.stderr
    manifest = json.loads((tmp_path / "bundle" / "bundle.json").read_text())
    assert sum(e["n_vectors"] for e in manifest["subgraphs"]) == 3
    assert all(e["missing"] == [] for e in manifest["subgraphs"])


def test_smoothing_never_hurts_recall(egem_file, data_dir, tmp_path):
    outputs = {}
    for mode, name in (("off", "plain"), ("knn", "smoothed")):
        result = egsmooth(
            "eval",
            "--graph", str(data_dir / "smoke_graph.jsonl"),
            "--embeddings", str(egem_file),
            "--dataset", str(data_dir / "smoke_dataset.tsv"),
            "--p-mode", mode,
            "--out", str(tmp_path / name),
        )
        assert result.returncode == 0, result.stderr
        outputs[name] = json.loads((tmp_path / name / "metrics.json").read_text())
    assert outputs["smoothed"]["max_recall"] >= outputs["plain"]["max_recall"]
    assert outputs["plain"]["max_recall"] == 0.5  # the direct edge only
