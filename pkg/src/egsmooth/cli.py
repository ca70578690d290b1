"""Single entry point: index building, dataset/QA evaluation, and query
inspection.

Exit codes: 0 success, 1 usage error, 2 data error. Option precedence is
flags > manifest file > defaults. Verbosity comes from EGSMOOTH_LOG
(debug/info/warning/error).
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import evaluate, qa
from .embeddings import load_embeddings
from .errors import EgsmoothError
from .graph import Predicate, load_graph
from .index import build_all_indexes, load_index_bundle, save_index_bundle
from .lexical import load_lexdb
from .smoother import (
    MODE_KNN,
    MODE_LEX_HYPERNYM,
    MODE_LEX_HYPONYM,
    MODE_OFF,
    Resources,
    SmoothingConfig,
    score_query,
)

log = logging.getLogger("egsmooth")

_MODE_FLAGS = {
    "off": MODE_OFF,
    "knn": MODE_KNN,
    "hypernym": MODE_LEX_HYPERNYM,
    "hyponym": MODE_LEX_HYPONYM,
}
_TRIGGER_FLAGS = {"on-miss": "on_miss", "always": "always"}

_DEFAULTS = {
    "p_mode": "off",
    "h_mode": "off",
    "k_prem": 4,
    "k_hyp": 2,
    "trigger": "on-miss",
    "bands": "2,5,10,15",
    "seed": 0,
    "limit": None,
    "lexdb": None,
    "embeddings": None,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we use 1
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _setup_logging() -> None:
    level = os.environ.get("EGSMOOTH_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _build_parser() -> _Parser:
    parser = _Parser(prog="egsmooth", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p: _Parser, *, dataset: bool = False, qa_file: bool = False) -> None:
        p.add_argument("--manifest", help="JSON file supplying any of the other options")
        p.add_argument("--graph", help="entailment graph JSONL file")
        p.add_argument("--embeddings", help="EGEM embedding file")
        p.add_argument("--lexdb", help="lexical database JSONL file")
        if dataset:
            p.add_argument("--dataset", help="entailment dataset TSV file")
        if qa_file:
            p.add_argument("--qa", help="QA examples JSONL file")
        p.add_argument("--p-mode", choices=sorted(_MODE_FLAGS), dest="p_mode")
        p.add_argument("--h-mode", choices=sorted(_MODE_FLAGS), dest="h_mode")
        p.add_argument("--k-prem", type=int, dest="k_prem")
        p.add_argument("--k-hyp", type=int, dest="k_hyp")
        p.add_argument("--trigger", choices=sorted(_TRIGGER_FLAGS))
        p.add_argument("--out", help="output directory")
        p.add_argument("--seed", type=int, help="seed for sampling utilities")
        p.add_argument("--limit", type=int, help="random subsample size (uses --seed)")

    p_index = sub.add_parser("index", help="precompute per-subgraph KNN indexes")
    p_index.add_argument("--manifest")
    p_index.add_argument("--graph")
    p_index.add_argument("--embeddings")
    p_index.add_argument("--out")

    p_eval = sub.add_parser("eval", help="score a dataset and write metrics")
    add_common(p_eval, dataset=True)

    p_qa = sub.add_parser("qa", help="evaluate boolean QA with context bands")
    add_common(p_qa, qa_file=True)
    p_qa.add_argument("--bands", help="comma-separated band edges, e.g. 2,5,10,15")

    p_explain = sub.add_parser("explain", help="trace one entailment query")
    add_common(p_explain)
    p_explain.add_argument("premise", help="premise relation string")
    p_explain.add_argument("hypothesis", help="hypothesis relation string")
    p_explain.add_argument("--types", help="left#right when the relations are bare")

    return parser


def _merge_options(args: argparse.Namespace, required: tuple[str, ...]) -> dict:
    merged = dict(_DEFAULTS)
    manifest_path = getattr(args, "manifest", None)
    if manifest_path:
        try:
            with open(manifest_path, "r", encoding="utf-8") as fh:
                manifest = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise EgsmoothError(f"cannot read manifest {manifest_path}: {e}") from e
        if not isinstance(manifest, dict):
            raise EgsmoothError(f"manifest {manifest_path} must be a JSON object")
        merged.update({k.replace("-", "_"): v for k, v in manifest.items()})
    for key, value in vars(args).items():
        if value is not None and key not in ("command", "manifest"):
            merged[key] = value
    missing = [name for name in required if not merged.get(name)]
    if missing:
        raise EgsmoothError(f"missing required option(s): {', '.join('--' + m for m in missing)}")
    for name in required:
        if name in ("graph", "embeddings", "lexdb", "dataset", "qa") and not Path(merged[name]).exists():
            raise EgsmoothError(f"--{name} file not found: {merged[name]}")
    for opt in ("embeddings", "lexdb"):
        if merged.get(opt) and not Path(merged[opt]).exists():
            raise EgsmoothError(f"--{opt} file not found: {merged[opt]}")
    return merged


def _config_from(options: dict) -> SmoothingConfig:
    try:
        return SmoothingConfig(
            premise_mode=_MODE_FLAGS[options["p_mode"]],
            hypothesis_mode=_MODE_FLAGS[options["h_mode"]],
            k_prem=int(options["k_prem"]),
            k_hyp=int(options["k_hyp"]),
            trigger=_TRIGGER_FLAGS[options["trigger"]],
        )
    except KeyError as e:
        raise EgsmoothError(f"bad smoothing option: {e}") from e
    except ValueError as e:
        raise EgsmoothError(str(e)) from e


def _resources_from(options: dict, config: SmoothingConfig) -> Resources:
    graph = load_graph(options["graph"])
    res = Resources(graph=graph)
    needs_knn = MODE_KNN in (config.premise_mode, config.hypothesis_mode)
    needs_lex = {MODE_LEX_HYPERNYM, MODE_LEX_HYPONYM} & {config.premise_mode, config.hypothesis_mode}
    if options.get("embeddings"):
        store = load_embeddings(options["embeddings"])
        res.store = store
        indexes, missing = build_all_indexes(graph, store)
        res.indexes = indexes
        for sig, relations in missing.items():
            log.info("subgraph %s: %d vertices without vectors", sig, len(relations))
    elif needs_knn:
        raise EgsmoothError("knn smoothing requires --embeddings")
    if options.get("lexdb"):
        res.lexdb = load_lexdb(options["lexdb"])
    elif needs_lex:
        raise EgsmoothError("lexical smoothing requires --lexdb")
    return res


def _config_echo(options: dict) -> dict:
    return {
        "p_mode": options["p_mode"],
        "h_mode": options["h_mode"],
        "k_prem": int(options["k_prem"]),
        "k_hyp": int(options["k_hyp"]),
        "trigger": options["trigger"],
        "seed": int(options["seed"]),
        "limit": options["limit"],
    }


def _write_json(payload: dict, path: Path) -> None:
    payload = dict(payload)
    payload["generated_at"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _subsample(items: list, limit: int | None, seed: int) -> list:
    if limit is None or limit >= len(items):
        return items
    rng = np.random.default_rng(seed)
    keep = sorted(rng.choice(len(items), size=limit, replace=False).tolist())
    return [items[i] for i in keep]


def _cmd_index(args: argparse.Namespace) -> int:
    options = _merge_options(args, required=("graph", "embeddings", "out"))
    graph = load_graph(options["graph"])
    store = load_embeddings(options["embeddings"])
    indexes, missing = build_all_indexes(graph, store)
    out_dir = Path(options["out"])
    manifest = save_index_bundle(indexes.values(), out_dir)
    for sig, relations in sorted(missing.items()):
        print(f"warning: subgraph {sig}: {len(relations)} vertices without vectors", file=sys.stderr)
    print(f"indexed {len(indexes)} subgraphs "
          f"({sum(e['n_vectors'] for e in manifest['subgraphs'])} vectors) -> {out_dir}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    options = _merge_options(args, required=("graph", "dataset", "out"))
    config = _config_from(options)
    res = _resources_from(options, config)
    dataset = evaluate.load_dataset(options["dataset"])
    examples = _subsample(dataset.examples, options["limit"], int(options["seed"]))
    dataset = evaluate.Dataset(examples)
    scored = evaluate.score_dataset(dataset, res, config)
    report = evaluate.compute_metrics(scored)

    out_dir = Path(options["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "dataset": str(options["dataset"]),
        "graph": str(options["graph"]),
        "config": _config_echo(options),
        **evaluate.report_as_dict(report),
    }
    _write_json(payload, out_dir / "metrics.json")
    evaluate.write_curve_csv(report.curve, out_dir / "pr_curve.csv")
    with open(out_dir / "scores.tsv", "w", encoding="utf-8") as fh:
        for ex, score in scored:
            fh.write(f"{ex.premise}\t{ex.hypothesis}\t{ex.label}\t{score!r}\n")
    print(
        f"n={report.n_examples} max_recall={report.max_recall * 100:.2f}% "
        f"AUC_n={report.auc_norm * 100:.2f}% AP={report.average_precision * 100:.2f}%"
    )
    return 0


def _cmd_qa(args: argparse.Namespace) -> int:
    options = _merge_options(args, required=("graph", "qa", "out"))
    config = _config_from(options)
    res = _resources_from(options, config)
    examples = qa.load_qa(options["qa"])
    examples = _subsample(examples, options["limit"], int(options["seed"]))
    try:
        edges = [int(tok) for tok in str(options["bands"]).split(",") if tok.strip() != ""]
        bands = qa.parse_bands(edges)
    except ValueError as e:
        raise EgsmoothError(f"bad --bands: {e}") from e

    partition, dropped = qa.band_partition(examples, bands)
    reports = qa.band_metrics(partition, res, config)
    overall = qa.overall_report(examples, res, config)

    out_dir = Path(options["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = {
        "qa_file": str(options["qa"]),
        "graph": str(options["graph"]),
        "config": _config_echo(options),
        "n_questions": len(examples),
        "n_dropped": len(dropped),
        "bands": [
            {
                "band": r.band.label(),
                "lower": r.band.lower,
                "upper": r.band.upper,
                "n_questions": r.n_questions,
                "auc_norm": r.auc_norm,
                "miss_rate": r.miss_rate,
            }
            for r in reports
        ],
        "all_questions_auc_norm": overall.auc_norm if overall else None,
    }
    _write_json(payload, out_dir / "qa_bands.json")
    qa.write_band_csv(reports, out_dir / "qa_bands.csv")
    for r in reports:
        auc = "undefined" if r.auc_norm is None else f"{r.auc_norm * 100:.2f}%"
        print(f"band {r.band.label()}: n={r.n_questions} AUC_n={auc} miss_rate={r.miss_rate * 100:.1f}%")
    if overall is not None:
        print(f"all questions: n={len(examples)} AUC_n={overall.auc_norm * 100:.2f}%")
    if dropped:
        print(f"dropped {len(dropped)} questions outside all bands", file=sys.stderr)
    return 0


def _cmd_explain(args: argparse.Namespace) -> int:
    options = _merge_options(args, required=("graph",))
    config = _config_from(options)
    res = _resources_from(options, config)
    types = getattr(args, "types", None)
    from .graph import TypeSignature

    signature = TypeSignature.parse(types) if types else None
    premise = Predicate.parse(args.premise, signature)
    hypothesis = Predicate.parse(args.hypothesis, signature)
    verdict = score_query(premise, hypothesis, res, config)

    print(f"query: {premise} |= {hypothesis}")
    print("premise candidates:")
    for c in verdict.query.premise_candidates:
        print(f"  {c.predicate}  [{c.provenance()}]")
    if not verdict.query.premise_candidates:
        print("  (none)")
    print("hypothesis candidates:")
    for c in verdict.query.hypothesis_candidates:
        print(f"  {c.predicate}  [{c.provenance()}]")
    if not verdict.query.hypothesis_candidates:
        print("  (none)")
    print(f"score: {verdict.score:g}")
    print(verdict.explanation)
    return 0


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse exits for usage errors and --help
        return int(e.code or 0)
    handlers = {
        "index": _cmd_index,
        "eval": _cmd_eval,
        "qa": _cmd_qa,
        "explain": _cmd_explain,
    }
    try:
        return handlers[args.command](args)
    except EgsmoothError as e:
        print(f"egsmooth: error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"egsmooth: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
