"""Offline extractor producing EGEM predicate-embedding files from a
masked language model."""

from .egem import read_egem, write_egem
from .extract import Encoder, ExtractionJob, TokenAudit, run_job
from .predicates import (
    ParsedRelation,
    RelationError,
    RenderedSentence,
    parse_relation,
    predicates_from_file,
    predicates_from_graph,
    render,
)

__version__ = "0.1.0"

__all__ = [
    "Encoder",
    "ExtractionJob",
    "ParsedRelation",
    "RelationError",
    "RenderedSentence",
    "TokenAudit",
    "parse_relation",
    "predicates_from_file",
    "predicates_from_graph",
    "read_egem",
    "render",
    "run_job",
    "write_egem",
    "__version__",
]
