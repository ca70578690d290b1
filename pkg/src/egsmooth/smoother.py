"""Entailment scoring with vertex smoothing.

A query asks whether premise p entails hypothesis h. When either predicate
is missing from the graph vocabulary, a direct edge lookup is impossible;
smoothing replaces the missing side with in-vocabulary stand-ins that keep
the inference chain transitive:

* a missing premise is generalized: replacements p' with p |= p', so a
  confirmed p' |= h confirms p |= h;
* a missing hypothesis is specialized: replacements h' with h' |= h, so a
  confirmed p |= h' confirms p |= h.

Replacements come either from K-nearest-neighbor search in embedding space
or from a lexical taxonomy (hypernyms generalize, hyponyms specialize).
The final score is the maximum edge weight over all candidate pairs: any
confirmed chain confirms the query, and the maximum is monotone in K.

All inputs are immutable; scoring is pure and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .embeddings import EmbeddingStore
from .errors import EgsmoothError, SignatureMismatchError
from .graph import EntailmentGraph, Predicate, TypeSignature, contains_predicate, lookup_edge
from .index import SubgraphEmbeddingIndex, knn_query
from .lexical import HYPERNYM, HYPONYM, LexicalDB, lexical_replacements

MODE_OFF = "off"
MODE_KNN = "knn"
MODE_LEX_HYPERNYM = "lex_hypernym"
MODE_LEX_HYPONYM = "lex_hyponym"
MODES = (MODE_OFF, MODE_KNN, MODE_LEX_HYPERNYM, MODE_LEX_HYPONYM)

TRIGGER_ON_MISS = "on_miss"
TRIGGER_ALWAYS = "always"
TRIGGERS = (TRIGGER_ON_MISS, TRIGGER_ALWAYS)


@dataclass(frozen=True)
class SmoothingConfig:
    """Independent per-side smoothing modes plus neighbor counts.

    Defaults K_prem=4 and K_hyp=2 are the best-performing settings from
    the K in {2,3,4} sweep. ``on_miss`` only smooths predicates absent
    from the graph; ``always`` also augments present ones (ablation).
    """

    premise_mode: str = MODE_OFF
    hypothesis_mode: str = MODE_OFF
    k_prem: int = 4
    k_hyp: int = 2
    trigger: str = TRIGGER_ON_MISS

    def __post_init__(self):
        if self.premise_mode not in MODES:
            raise ValueError(f"premise_mode must be one of {MODES}, got {self.premise_mode!r}")
        if self.hypothesis_mode not in MODES:
            raise ValueError(f"hypothesis_mode must be one of {MODES}, got {self.hypothesis_mode!r}")
        if self.k_prem < 1 or self.k_hyp < 1:
            raise ValueError("K values must be >= 1")
        if self.trigger not in TRIGGERS:
            raise ValueError(f"trigger must be one of {TRIGGERS}, got {self.trigger!r}")


@dataclass(frozen=True)
class Candidate:
    """A replacement predicate and where it came from."""

    predicate: Predicate
    origin: str  # "direct" | "knn" | "lexical"
    distance: float | None = None  # knn
    lex_relation: str | None = None  # lexical: hypernym | hyponym
    source_word: str | None = None  # lexical: the substituted head word

    def provenance(self) -> str:
        if self.origin == "knn":
            return f"knn distance {self.distance:.4g}"
        if self.origin == "lexical":
            return f"{self.lex_relation}({self.source_word})"
        return "direct"


@dataclass
class Resources:
    """Everything a smoother may consult. Index/store/lexdb are optional;
    modes that need an absent resource raise."""

    graph: EntailmentGraph
    indexes: Mapping[TypeSignature, SubgraphEmbeddingIndex] | None = None
    store: EmbeddingStore | None = None
    lexdb: LexicalDB | None = None
    backend: str | None = None  # KNN backend override, None = env/default


@dataclass
class SmoothedQuery:
    premise: Predicate
    hypothesis: Predicate
    signature: TypeSignature
    premise_candidates: list[Candidate] = field(default_factory=list)
    hypothesis_candidates: list[Candidate] = field(default_factory=list)


@dataclass
class EntailmentVerdict:
    score: float
    witness: tuple[Candidate, Candidate, float] | None
    explanation: str
    query: SmoothedQuery


def _smooth_side(
    pred: Predicate,
    res: Resources,
    mode: str,
    k: int,
    lex_relation_for_mode: dict[str, str],
    trigger: str,
) -> list[Candidate]:
    present = contains_predicate(res.graph, pred)
    if mode == MODE_OFF:
        return [Candidate(pred, "direct")] if present else []
    if present and trigger == TRIGGER_ON_MISS:
        return [Candidate(pred, "direct")]

    candidates: list[Candidate] = []
    seen: set[str] = set()
    if present:
        candidates.append(Candidate(pred, "direct"))
        seen.add(pred.relation)

    if mode == MODE_KNN:
        if res.indexes is None or res.store is None:
            raise EgsmoothError("knn smoothing requires an embedding store and index bundle")
        index = res.indexes.get(pred.signature)
        vector = res.store.get(pred.relation)
        # No index for this signature or no vector for this predicate means
        # there is nothing to search; the query side simply has no stand-in.
        if index is not None and vector is not None:
            for neighbor, distance in knn_query(index, vector, k, backend=res.backend):
                if neighbor.relation not in seen:
                    seen.add(neighbor.relation)
                    candidates.append(Candidate(neighbor, "knn", distance=distance))
    else:
        if res.lexdb is None:
            raise EgsmoothError(f"{mode} smoothing requires a lexical database")
        lex_relation = lex_relation_for_mode[mode]
        for replacement in lexical_replacements(pred, lex_relation, res.lexdb):
            if replacement.relation in seen:
                continue
            if contains_predicate(res.graph, replacement):
                seen.add(replacement.relation)
                candidates.append(
                    Candidate(
                        replacement,
                        "lexical",
                        lex_relation=lex_relation,
                        source_word=pred.head_word(),
                    )
                )
    return candidates


_LEX_FOR_MODE = {MODE_LEX_HYPERNYM: HYPERNYM, MODE_LEX_HYPONYM: HYPONYM}


def smooth_premise(p: Predicate, res: Resources, config: SmoothingConfig) -> list[Candidate]:
    """Candidate premises: the predicate itself when present, otherwise
    generalizing replacements per the configured premise mode."""
    return _smooth_side(p, res, config.premise_mode, config.k_prem, _LEX_FOR_MODE, config.trigger)


def smooth_hypothesis(h: Predicate, res: Resources, config: SmoothingConfig) -> list[Candidate]:
    """Candidate hypotheses: the predicate itself when present, otherwise
    specializing replacements per the configured hypothesis mode."""
    return _smooth_side(h, res, config.hypothesis_mode, config.k_hyp, _LEX_FOR_MODE, config.trigger)


def score_query(
    p: Predicate,
    h: Predicate,
    res: Resources,
    config: SmoothingConfig,
) -> EntailmentVerdict:
    """Score premise |= hypothesis as the maximum graph edge weight over
    the cross product of premise and hypothesis candidates.

    Absent edges count as 0; an empty candidate list on either side makes
    the score 0. The witness is the first maximizing pair in candidate
    order (direct first, then by neighbor rank / sense order), so results
    are deterministic.
    """
    if p.signature != h.signature:
        raise SignatureMismatchError(
            f"premise signature {p.signature} != hypothesis signature {h.signature}"
        )
    query = SmoothedQuery(
        premise=p,
        hypothesis=h,
        signature=p.signature,
        premise_candidates=smooth_premise(p, res, config),
        hypothesis_candidates=smooth_hypothesis(h, res, config),
    )
    best = 0.0
    witness: tuple[Candidate, Candidate, float] | None = None
    for pc in query.premise_candidates:
        for hc in query.hypothesis_candidates:
            edge = lookup_edge(res.graph, pc.predicate, hc.predicate)
            if edge is not None and edge > best:
                best = edge
                witness = (pc, hc, edge)
    return EntailmentVerdict(
        score=best,
        witness=witness,
        explanation=_explain(p, h, witness),
        query=query,
    )


def _explain(p: Predicate, h: Predicate, witness: tuple[Candidate, Candidate, float] | None) -> str:
    if witness is None:
        return f"{p} |= {h}: no entailment path found (score 0)"
    pc, hc, edge = witness
    parts = []
    if pc.origin != "direct":
        parts.append(f"{p} |= {pc.predicate} [premise smoothing: {pc.provenance()}]")
    if pc.predicate.relation == hc.predicate.relation:
        parts.append(f"{pc.predicate} |= {hc.predicate} [reflexive]")
    else:
        parts.append(f"{pc.predicate} |= {hc.predicate} [EG edge {edge:g}]")
    if hc.origin != "direct":
        parts.append(f"{hc.predicate} |= {h} [hypothesis smoothing: {hc.provenance()}]")
    return "; ".join(parts)
