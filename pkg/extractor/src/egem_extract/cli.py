"""Command line entry point: render graph predicates, encode them with a
masked LM, and write the EGEM embedding file."""

from __future__ import annotations

import argparse
import logging
import sys

from .egem import write_egem
from .extract import ExtractionJob, run_job
from .predicates import RelationError, predicates_from_file, predicates_from_graph


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="egem-extract", description=__doc__)
    parser.add_argument("--graph", required=True, help="entailment graph JSONL file")
    parser.add_argument("--model", required=True, help="masked LM name or local path")
    parser.add_argument("--out", required=True, help="output EGEM file")
    parser.add_argument("--batch", type=int, default=32)
    parser.add_argument(
        "--layer",
        default="last",
        help="'last' or an index into the hidden states (0 = embedding layer)",
    )
    parser.add_argument(
        "--predicates",
        help="optional file of extra relation strings to encode, one per line "
        "(e.g. expected query predicates missing from the graph)",
    )
    parser.add_argument("--lowercase", action="store_true",
                        help="lowercase sentences before tokenization")
    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        predicates = predicates_from_graph(args.graph)
        if args.predicates:
            predicates += predicates_from_file(args.predicates)
    except (OSError, RelationError) as e:
        print(f"egem-extract: error: {e}", file=sys.stderr)
        return 2
    job = ExtractionJob(
        predicates=predicates,
        model=args.model,
        out_path=args.out,
        batch_size=args.batch,
        layer=args.layer,
        lowercase=args.lowercase,
    )
    try:
        vectors, _audits = run_job(job)
    except Exception as e:  # model loading / inference failures
        print(f"egem-extract: error: {e}", file=sys.stderr)
        return 2
    if not vectors:
        print("egem-extract: error: no predicates could be encoded", file=sys.stderr)
        return 2
    dim = next(iter(vectors.values())).shape[0]
    write_egem(vectors, dim, args.out)
    print(f"wrote {len(vectors)} vectors (dim {dim}) -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
