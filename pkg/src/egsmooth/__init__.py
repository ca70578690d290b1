"""Directional entailment inference over typed entailment graphs, with
KNN-embedding and lexical-taxonomy smoothing of missing predicates."""

from .embeddings import EmbeddingStore, load_embeddings, save_embeddings
from .errors import (
    EgsmoothError,
    FormatError,
    MetricsError,
    PredicateParseError,
    SignatureMismatchError,
)
from .graph import (
    EntailmentEdge,
    EntailmentGraph,
    Predicate,
    TypedSubgraph,
    TypeSignature,
    contains_predicate,
    load_graph,
    lookup_edge,
    serialize_graph,
)
from .index import (
    SubgraphEmbeddingIndex,
    build_all_indexes,
    build_index,
    brute_force_knn,
    knn_query,
    load_index_bundle,
    save_index_bundle,
)
from .lexical import LexicalDB, import_wordnet_database, lexical_replacements, load_lexdb, save_lexdb
from .sentences import PredicateSentence, render_sentence
from .smoother import (
    Candidate,
    EntailmentVerdict,
    Resources,
    SmoothedQuery,
    SmoothingConfig,
    score_query,
    smooth_hypothesis,
    smooth_premise,
)

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "EgsmoothError",
    "EmbeddingStore",
    "EntailmentEdge",
    "EntailmentGraph",
    "EntailmentVerdict",
    "FormatError",
    "LexicalDB",
    "MetricsError",
    "Predicate",
    "PredicateParseError",
    "PredicateSentence",
    "Resources",
    "SignatureMismatchError",
    "SmoothedQuery",
    "SmoothingConfig",
    "SubgraphEmbeddingIndex",
    "TypeSignature",
    "TypedSubgraph",
    "brute_force_knn",
    "build_all_indexes",
    "build_index",
    "contains_predicate",
    "import_wordnet_database",
    "knn_query",
    "lexical_replacements",
    "load_embeddings",
    "load_graph",
    "load_index_bundle",
    "load_lexdb",
    "lookup_edge",
    "render_sentence",
    "save_embeddings",
    "save_index_bundle",
    "save_lexdb",
    "score_query",
    "serialize_graph",
    "smooth_hypothesis",
    "smooth_premise",
    "__version__",
]
