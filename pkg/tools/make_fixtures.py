#!/usr/bin/env python3
"""Generate the checked-in test fixtures under tests/data/.

Everything here is hand-designed and deterministic; expected values in the
test suite were traced from these definitions before the library code was
written. Re-running overwrites the files in place.

Fixture layout (one person#thing subgraph, 12 vertices):

    edges: beat->play 0.9, defeat->play 0.8, crush->compete 0.7,
           rout->dominate 0.6, play->compete 0.5, buy->pay.for 0.6
    out-of-vocabulary predicates with stored vectors: obliterate, shop.for,
    demolish; without vectors: gobsmack, flummox.

2-D embeddings place obliterate's nearest in-graph neighbors in the order
beat, defeat, crush, rout (distances 0.1, 0.2, 0.3, 0.4), so premise
smoothing recovers more dataset positives as K grows: K=2 answers the
obliterate->play query via beat, K=3 adds obliterate->compete via crush,
K=4 adds obliterate->dominate via rout. shop.for sits next to buy and
pay.for; hyponym substitution (shop -> pay) makes buy->shop.for answerable
through the buy->pay.for edge.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from egsmooth.embeddings import EmbeddingStore, save_embeddings  # noqa: E402

DATA_DIR = Path(__file__).resolve().parents[1] / "tests" / "data"

TYPES = ["person", "thing"]
SIG = "person#thing"


def rel(word: str) -> str:
    special = {
        "pay.for": "(pay.1,pay.for.2)",
        "shop.for": "(shop.1,shop.for.2)",
    }
    body = special.get(word, f"({word}.1,{word}.2)")
    return f"{body}#{SIG}"


EDGES = [
    ("beat", "play", 0.9),
    ("defeat", "play", 0.8),
    ("crush", "compete", 0.7),
    ("rout", "dominate", 0.6),
    ("play", "compete", 0.5),
    ("buy", "pay.for", 0.6),
]

VERTICES = [
    "beat", "defeat", "crush", "rout", "play", "compete",
    "dominate", "buy", "pay.for", "win", "lose", "watch",
]

VECTORS = {
    "beat": (0.1, 0.0),
    "defeat": (0.0, 0.2),
    "crush": (0.3, 0.0),
    "rout": (0.0, 0.4),
    "play": (2.0, 0.0),
    "compete": (2.0, 0.5),
    "dominate": (2.2, 0.2),
    "win": (2.4, 0.1),
    "lose": (2.6, 0.6),
    "watch": (3.0, 3.0),
    "buy": (5.0, 5.0),
    "pay.for": (5.1, 5.0),
    # out-of-vocabulary but encodable
    "obliterate": (0.0, 0.0),
    "shop.for": (5.0, 5.2),
    "demolish": (0.05, 0.02),
}

# premise, hypothesis, label -- six positives, six negatives
DATASET = [
    ("beat", "play", True),        # direct edge 0.9
    ("defeat", "play", True),      # direct edge 0.8
    ("obliterate", "play", True),  # P-knn K>=2 -> 0.9 via beat
    ("obliterate", "compete", True),   # P-knn K>=3 -> 0.7 via crush
    ("obliterate", "dominate", True),  # P-knn K>=4 -> 0.6 via rout
    ("buy", "shop.for", True),     # H-hyponym -> 0.6 via pay.for
    ("play", "beat", False),
    ("play", "defeat", False),
    ("play", "obliterate", False),
    ("shop.for", "dominate", False),
    ("watch", "play", False),
    ("buy", "compete", False),
]

LEXDB = [
    {"word": "shop", "hypernyms": [["obtain"]], "hyponyms": [["pay"], ["browse"]]},
    {"word": "receive", "hypernyms": [["get", "obtain"]], "hyponyms": [["inherit"]]},
    {"word": "obliterate", "hypernyms": [["destroy"]], "hyponyms": []},
    {"word": "buy", "hypernyms": [["take_over", "purchase"]], "hyponyms": [["repurchase"]]},
]


def write_graph(path: Path) -> None:
    declared = set()
    lines = []
    by_source: dict[str, list] = {}
    for src, dst, score in EDGES:
        by_source.setdefault(src, []).append((dst, score))
    for word in VERTICES:
        entails = [{"pred": rel(d), "score": s} for d, s in sorted(by_source.get(word, []))]
        lines.append({"types": TYPES, "pred": rel(word), "entails": entails})
        declared.add(word)
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(json.dumps(line) + "\n")


def write_embeddings(path: Path) -> None:
    store = EmbeddingStore(dim=2)
    for word, vec in VECTORS.items():
        store.add(rel(word), np.array(vec, dtype=np.float32))
    save_embeddings(store, path)


def write_lexdb(path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for entry in LEXDB:
            fh.write(json.dumps(entry) + "\n")


def write_dataset(path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for premise, hypothesis, label in DATASET:
            fh.write(f"{rel(premise)}\t{rel(hypothesis)}\t{SIG}\t{label}\n")


# ---------------------------------------------------------------------------
# QA band fixture: 200 questions, 50 per band. Construction targets:
#   [2,5)  : 30% of questions have every eligible context missing from the
#            graph (10 true+recoverable, 5 false+unrecoverable), so premise
#            smoothing lifts band AUC_n from 0.4 to 1.0;
#   15+    : every context is in-graph, so smoothing changes nothing.
# ---------------------------------------------------------------------------

IN_GRAPH_FILLERS = ["watch", "lose", "win"]          # no edges into play
FALSE_CTX_POOL = ["lose", "win", "beat", "defeat", "play", "buy"]  # no edges into watch
OOV_NO_VECTOR = ["gobsmack", "flummox"]


def _stmt(word: str, arg1: str, arg2: str, swap: bool = False) -> dict:
    if swap:
        body = rel(word).split("#")[0]
        inner = body[1:-1].split(",")
        swapped = f"({inner[1]},{inner[0]})#thing#person"
        return {"rel": swapped, "arg1": arg2, "arg2": arg1, "types": "thing#person"}
    return {"rel": rel(word), "arg1": arg1, "arg2": arg2, "types": SIG}


def _question(qid: int, kind: str, n_ctx: int) -> dict:
    a, b = f"q{qid}_a", f"q{qid}_b"
    fillers = [IN_GRAPH_FILLERS[i % len(IN_GRAPH_FILLERS)] for i in range(n_ctx)]
    if kind == "t_direct":
        ctxs = [_stmt("beat", a, b)] + [_stmt(w, a, b) for w in fillers[1:]]
        q, label = ("play", True)
    elif kind == "t_direct_rev":
        # same entailment evidence, stored with reversed entity order
        ctxs = [_stmt("beat", a, b, swap=True)] + [_stmt(w, a, b) for w in fillers[1:]]
        q, label = ("play", True)
    elif kind == "t_smooth":
        ctxs = [_stmt("obliterate", a, b)] + [_stmt(w, a, b) for w in fillers[1:]]
        q, label = ("play", True)
    elif kind == "t_miss":
        oov = ["obliterate", "demolish"] + OOV_NO_VECTOR
        ctxs = [_stmt(oov[i % len(oov)], a, b) for i in range(n_ctx)]
        q, label = ("play", True)
    elif kind == "f_zero":
        pool = [w for w in FALSE_CTX_POOL]
        ctxs = [_stmt(pool[i % len(pool)], a, b) for i in range(n_ctx)]
        q, label = ("watch", False)
    elif kind == "f_zero_decoy":
        # one entity-mismatched context carrying the question's own relation;
        # it must stay ineligible or reflexivity would score it 1.0
        pool = [w for w in FALSE_CTX_POOL]
        ctxs = [_stmt(pool[i % len(pool)], a, b) for i in range(n_ctx - 1)]
        ctxs.append(_stmt("watch", f"other{qid}_a", f"other{qid}_b"))
        q, label = ("watch", False)
    elif kind == "f_miss":
        ctxs = [_stmt(OOV_NO_VECTOR[i % 2], a, b) for i in range(n_ctx)]
        q, label = ("win", False)
    else:
        raise ValueError(kind)
    return {"question": _stmt(q, a, b), "contexts": ctxs, "label": label}


BAND_PLANS = {
    # band label -> (context sizes cycled, [(kind, count), ...])
    "2-5": ([2, 3, 4], [
        ("t_direct", 9), ("t_direct_rev", 1), ("t_smooth", 5), ("t_miss", 10),
        ("f_zero", 18), ("f_zero_decoy", 2), ("f_miss", 5),
    ]),
    "5-10": ([5, 7, 9], [
        ("t_direct", 17), ("t_direct_rev", 1), ("t_smooth", 4), ("t_miss", 3),
        ("f_zero", 21), ("f_zero_decoy", 2), ("f_miss", 2),
    ]),
    "10-15": ([10, 12, 14], [
        ("t_direct", 20), ("t_smooth", 4), ("t_miss", 1),
        ("f_zero", 22), ("f_zero_decoy", 2), ("f_miss", 1),
    ]),
    "15+": ([15, 17, 20], [
        ("t_direct", 24), ("t_direct_rev", 1),
        ("f_zero", 23), ("f_zero_decoy", 2),
    ]),
}


def write_qa(path: Path) -> None:
    qid = 0
    records = []
    for _band, (sizes, plan) in BAND_PLANS.items():
        i = 0
        for kind, count in plan:
            for _ in range(count):
                records.append(_question(qid, kind, sizes[i % len(sizes)]))
                qid += 1
                i += 1
    assert len(records) == 200
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def main() -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    write_graph(DATA_DIR / "fixture_graph.jsonl")
    write_embeddings(DATA_DIR / "fixture_embeddings.egm")
    write_lexdb(DATA_DIR / "fixture_lexdb.jsonl")
    write_dataset(DATA_DIR / "fixture_dataset.tsv")
    write_qa(DATA_DIR / "fixture_qa.jsonl")
    print(f"fixtures written to {DATA_DIR}")


if __name__ == "__main__":
    main()
