"""Per-subgraph embedding indexes answering exact K-nearest-neighbor queries.

One index covers the vertices of one typed subgraph that have vectors in an
embedding store. Vocabulary order is the sorted relation string, which is
also the distance tie-break order, so query answers are deterministic across
platforms and rebuilds. Indexes are immutable once built; concurrent queries
are safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .embeddings import EmbeddingStore
from .errors import EgsmoothError
from .graph import EntailmentGraph, Predicate, TypedSubgraph, TypeSignature


@dataclass
class SubgraphEmbeddingIndex:
    signature: TypeSignature
    vocabulary: list[Predicate]  # sorted by relation string
    matrix: np.ndarray  # (n, dim) float32, rows aligned with vocabulary
    tree: tuple  # arrays from _kernels.build_tree
    missing: list[str]  # subgraph vertices that had no vector

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.vocabulary)


def build_index(
    subgraph: TypedSubgraph,
    store: EmbeddingStore,
    leaf_size: int = _kernels.DEFAULT_LEAF_SIZE,
) -> SubgraphEmbeddingIndex:
    """Index every subgraph vertex that has a vector in the store.

    Vertices without vectors are excluded and reported in ``missing``.
    Raises when no vertex has a vector at all.
    """
    covered = sorted(rel for rel in subgraph.vertices if rel in store)
    missing = sorted(rel for rel in subgraph.vertices if rel not in store)
    if not covered:
        raise EgsmoothError(
            f"no embeddings for any of the {len(subgraph.vertices)} vertices "
            f"of subgraph {subgraph.signature}"
        )
    matrix = np.stack([store.entries[rel] for rel in covered]).astype(np.float32)
    tree = _kernels.build_tree(matrix, leaf_size=leaf_size)
    vocabulary = [subgraph.vertices[rel] for rel in covered]
    return SubgraphEmbeddingIndex(subgraph.signature, vocabulary, matrix, tree, missing)


def _check_dim(dim: int, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != dim:
        raise EgsmoothError(f"query vector has shape {x.shape}, index dim is {dim}")
    return x


def knn_query(
    index: SubgraphEmbeddingIndex,
    x: np.ndarray,
    k: int,
    backend: str | None = None,
) -> list[tuple[Predicate, float]]:
    """The min(k, |vocabulary|) nearest predicates to x under L2 distance,
    ascending, ties broken by lexicographic relation string."""
    x = _check_dim(index.dim, x)
    if k < 1:
        raise ValueError("k must be >= 1")
    tree_arrays = (*index.tree, index.matrix)
    idx, dist = _kernels.query_tree(tree_arrays, x, k, backend=backend)
    return [(index.vocabulary[i], float(d)) for i, d in zip(idx, dist)]


def brute_force_knn(
    vocabulary: Sequence[Predicate],
    store: EmbeddingStore,
    x: np.ndarray,
    k: int,
) -> list[tuple[Predicate, float]]:
    """Exhaustive-scan KNN over the store vectors of the given predicates.

    Output contract is identical to knn_query; this is the reference
    implementation the tree is tested against.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    covered = sorted({p.relation for p in vocabulary if p.relation in store})
    if not covered:
        return []
    by_rel = {p.relation: p for p in vocabulary}
    matrix = np.stack([store.entries[rel] for rel in covered]).astype(np.float32)
    x = _check_dim(matrix.shape[1], x)
    idx, dist = _kernels.brute_force(matrix, x, k)
    return [(by_rel[covered[i]], float(d)) for i, d in zip(idx, dist)]


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

_TREE_KEYS = ("idx_array", "node_start", "node_end", "node_is_leaf", "node_centroid", "node_radius")


def save_index_bundle(indexes: Iterable[SubgraphEmbeddingIndex], out_dir: str | Path) -> dict:
    """Persist indexes to a directory: a manifest plus one npz per subgraph.

    Returns the manifest dict (also written as bundle.json).
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for pos, index in enumerate(sorted(indexes, key=lambda ix: ix.signature.as_key())):
        fname = f"subgraph_{pos:04d}.npz"
        arrays = dict(zip(_TREE_KEYS, index.tree))
        np.savez(
            out_dir / fname,
            matrix=index.matrix,
            vocabulary=np.array([p.relation for p in index.vocabulary], dtype=object),
            **arrays,
        )
        entries.append(
            {
                "types": [index.signature.left, index.signature.right],
                "file": fname,
                "n_vectors": len(index.vocabulary),
                "dim": index.dim,
                "missing": index.missing,
            }
        )
    manifest = {"format": "egsmooth-index-bundle", "version": 1, "subgraphs": entries}
    with open(out_dir / "bundle.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_index_bundle(bundle_dir: str | Path) -> dict[TypeSignature, SubgraphEmbeddingIndex]:
    """Reload a persisted bundle; query answers are identical to the
    freshly built indexes because the tree arrays are stored verbatim."""
    bundle_dir = Path(bundle_dir)
    with open(bundle_dir / "bundle.json", "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("format") != "egsmooth-index-bundle":
        raise EgsmoothError(f"{bundle_dir}: not an index bundle")
    indexes: dict[TypeSignature, SubgraphEmbeddingIndex] = {}
    for entry in manifest["subgraphs"]:
        signature = TypeSignature(entry["types"][0], entry["types"][1])
        with np.load(bundle_dir / entry["file"], allow_pickle=True) as blob:
            vocabulary = [Predicate.parse(rel) for rel in blob["vocabulary"].tolist()]
            matrix = blob["matrix"]
            tree = tuple(blob[key] for key in _TREE_KEYS)
        indexes[signature] = SubgraphEmbeddingIndex(
            signature, vocabulary, matrix, tree, list(entry.get("missing", []))
        )
    return indexes


def build_all_indexes(
    graph: EntailmentGraph,
    store: EmbeddingStore,
    leaf_size: int = _kernels.DEFAULT_LEAF_SIZE,
) -> tuple[dict[TypeSignature, SubgraphEmbeddingIndex], dict[str, list[str]]]:
    """Build an index per typed subgraph. Subgraphs with no covered vertex
    are skipped; the second return value maps signature keys to the vertex
    relations that had no vector (including fully uncovered subgraphs)."""
    indexes: dict[TypeSignature, SubgraphEmbeddingIndex] = {}
    missing: dict[str, list[str]] = {}
    for signature, subgraph in graph.subgraphs.items():
        try:
            index = build_index(subgraph, store, leaf_size=leaf_size)
        except EgsmoothError:
            missing[signature.as_key()] = sorted(subgraph.vertices)
            continue
        indexes[signature] = index
        if index.missing:
            missing[signature.as_key()] = index.missing
    return indexes, missing
