"""Typed entailment graphs: predicates, weighted directed edges, and lookups.

A graph is a collection of typed subgraphs, one per ordered pair of argument
types. Vertices are typed binary predicates written in the relation syntax

    (word[.word...].slot, word[.word...].slot)#type1#type2

e.g. ``(join.1,join.2)#person#organization``. Graphs are immutable after
loading; every query operation is read-only and safe to call from many
threads at once.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError, PredicateParseError, SignatureMismatchError

_TYPE_SLOT_SUFFIX = re.compile(r"_[12]$")


def _strip_slot_suffix(type_token: str) -> str:
    """Drop a trailing _1/_2 disambiguator from a type token."""
    return _TYPE_SLOT_SUFFIX.sub("", type_token)


def _check_type_name(name: str) -> str:
    if not name:
        raise PredicateParseError("empty type name")
    if any(c.isspace() for c in name):
        raise PredicateParseError(f"type name contains whitespace: {name!r}")
    return name


@dataclass(frozen=True, slots=True)
class TypeSignature:
    """Ordered pair of argument type names. (a, b) != (b, a)."""

    left: str
    right: str

    def __post_init__(self):
        _check_type_name(self.left)
        _check_type_name(self.right)

    @classmethod
    def parse(cls, pair: str) -> "TypeSignature":
        """Parse ``left#right``; _1/_2 disambiguators are stripped."""
        parts = pair.split("#")
        if len(parts) != 2:
            raise PredicateParseError(f"expected 'left#right', got {pair!r}")
        return cls(_strip_slot_suffix(parts[0]), _strip_slot_suffix(parts[1]))

    def rendered_args(self) -> tuple[str, str]:
        """Argument words for sentence rendering; equal types get _1/_2."""
        if self.left == self.right:
            return f"{self.left}_1", f"{self.left}_2"
        return self.left, self.right

    def type_tokens(self) -> tuple[str, str]:
        """Type tokens as they appear in a canonical relation string."""
        return self.rendered_args() if self.left == self.right else (self.left, self.right)

    def as_key(self) -> str:
        return f"{self.left}#{self.right}"

    def __str__(self) -> str:
        return self.as_key()


@dataclass(frozen=True, slots=True)
class PredicatePath:
    """One slot-annotated word sequence of a binary relation, e.g. give.to.2."""

    words: tuple[str, ...]
    slot: int

    def render(self) -> str:
        return ".".join(self.words) + f".{self.slot}"


def _parse_path(token: str) -> PredicatePath:
    parts = token.split(".")
    if len(parts) < 2:
        raise PredicateParseError(f"path {token!r} lacks a slot index")
    words, slot_tok = parts[:-1], parts[-1]
    if slot_tok not in ("1", "2"):
        raise PredicateParseError(f"slot index must be 1 or 2, got {slot_tok!r} in {token!r}")
    if not all(words) or not words:
        raise PredicateParseError(f"empty word in path {token!r}")
    return PredicatePath(tuple(words), int(slot_tok))


@dataclass(frozen=True, slots=True)
class Predicate:
    """A typed binary relation; identity is the canonical relation string.

    Canonicalization: when both argument types are equal the type tokens
    carry _1/_2 suffixes; otherwise suffixes are stripped. This makes the
    same predicate written either way compare equal.
    """

    relation: str
    signature: TypeSignature
    paths: tuple[PredicatePath, PredicatePath]

    @classmethod
    def parse(cls, relation: str, types: TypeSignature | None = None) -> "Predicate":
        """Parse a relation string, optionally joining it with a type pair.

        ``relation`` either carries its own ``#type1#type2`` suffix or is a
        bare ``(a.1,b.2)`` form completed by ``types``. When both are given
        they must agree.
        """
        text = relation.strip()
        if not text:
            raise PredicateParseError("empty relation string")
        pieces = text.split("#")
        body = pieces[0]
        if len(pieces) == 3:
            parsed_sig = TypeSignature(
                _strip_slot_suffix(_check_type_name(pieces[1])),
                _strip_slot_suffix(_check_type_name(pieces[2])),
            )
            if types is not None and parsed_sig != types:
                raise PredicateParseError(
                    f"type suffix {pieces[1]}#{pieces[2]} does not match "
                    f"declared types {types}"
                )
            signature = parsed_sig
        elif len(pieces) == 1:
            if types is None:
                raise PredicateParseError(f"relation {text!r} has no type suffix and no types given")
            signature = types
        else:
            raise PredicateParseError(f"expected exactly two type tokens in {text!r}")

        if not (body.startswith("(") and body.endswith(")")):
            raise PredicateParseError(f"relation body must be parenthesized: {body!r}")
        inner = body[1:-1]
        path_tokens = inner.split(",")
        if len(path_tokens) != 2:
            raise PredicateParseError(f"expected two comma-separated paths in {body!r}")
        paths = (_parse_path(path_tokens[0]), _parse_path(path_tokens[1]))

        t1, t2 = signature.type_tokens()
        canonical = f"({paths[0].render()},{paths[1].render()})#{t1}#{t2}"
        return cls(canonical, signature, paths)

    def head_word(self) -> str:
        """First word of the relation, used for lexical substitution."""
        return self.paths[0].words[0]

    def swapped(self) -> "Predicate":
        """The same relation with its argument slots exchanged.

        Used when an (entity1, relation, entity2) statement is matched
        against a question mentioning the entities in the other order.
        """
        sig = TypeSignature(self.signature.right, self.signature.left)
        t1, t2 = sig.type_tokens()
        rel = f"({self.paths[1].render()},{self.paths[0].render()})#{t1}#{t2}"
        return Predicate(rel, sig, (self.paths[1], self.paths[0]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Predicate):
            return NotImplemented
        return self.relation == other.relation

    def __hash__(self) -> int:
        return hash(self.relation)

    def __lt__(self, other: "Predicate") -> bool:
        return self.relation < other.relation

    def __str__(self) -> str:
        return self.relation


@dataclass(frozen=True, slots=True)
class EntailmentEdge:
    target: Predicate
    score: float


@dataclass
class TypedSubgraph:
    """Vertices and directed weighted edges for one ordered type pair."""

    signature: TypeSignature
    vertices: dict[str, Predicate] = field(default_factory=dict)
    # source relation -> {target relation -> score}
    edges: dict[str, dict[str, float]] = field(default_factory=dict)

    def add_vertex(self, p: Predicate) -> None:
        if p.signature != self.signature:
            raise SignatureMismatchError(
                f"vertex {p} does not carry subgraph signature {self.signature}"
            )
        self.vertices.setdefault(p.relation, p)

    def add_edge(self, source: Predicate, target: Predicate, score: float) -> None:
        if not (0.0 <= score <= 1.0):
            raise ValueError(f"edge score {score} outside [0, 1]")
        self.add_vertex(source)
        self.add_vertex(target)
        outgoing = self.edges.setdefault(source.relation, {})
        if target.relation in outgoing:
            raise ValueError(f"duplicate edge {source} -> {target}")
        outgoing[target.relation] = score

    def out_edges(self, source: Predicate) -> list[EntailmentEdge]:
        out = self.edges.get(source.relation, {})
        return [EntailmentEdge(self.vertices[t], s) for t, s in out.items()]

    @property
    def n_edges(self) -> int:
        return sum(len(v) for v in self.edges.values())


@dataclass
class EntailmentGraph:
    """Immutable-after-load map of type signatures to typed subgraphs."""

    name: str = ""
    subgraphs: dict[TypeSignature, TypedSubgraph] = field(default_factory=dict)

    def subgraph(self, signature: TypeSignature) -> TypedSubgraph | None:
        return self.subgraphs.get(signature)

    def get_or_create(self, signature: TypeSignature) -> TypedSubgraph:
        sg = self.subgraphs.get(signature)
        if sg is None:
            sg = TypedSubgraph(signature)
            self.subgraphs[signature] = sg
        return sg

    @property
    def n_vertices(self) -> int:
        return sum(len(sg.vertices) for sg in self.subgraphs.values())

    @property
    def n_edges(self) -> int:
        return sum(sg.n_edges for sg in self.subgraphs.values())


def contains_predicate(graph: EntailmentGraph, p: Predicate) -> bool:
    """True iff p is a vertex of the subgraph keyed by its signature."""
    sg = graph.subgraph(p.signature)
    return sg is not None and p.relation in sg.vertices


def lookup_edge(graph: EntailmentGraph, premise: Predicate, hypothesis: Predicate) -> float | None:
    """Weight of the directed edge premise -> hypothesis, if present.

    Self-entailment is reflexive by definition and always scores 1.0.
    Edges are directed: (a -> b) says nothing about (b -> a).
    """
    if premise.signature != hypothesis.signature:
        raise SignatureMismatchError(
            f"premise signature {premise.signature} != hypothesis signature {hypothesis.signature}"
        )
    if premise.relation == hypothesis.relation:
        return 1.0
    sg = graph.subgraph(premise.signature)
    if sg is None:
        return None
    return sg.edges.get(premise.relation, {}).get(hypothesis.relation)


def load_graph(path: str | Path, name: str | None = None) -> EntailmentGraph:
    """Load a graph from the JSON-lines format.

    Each line is ``{"types": [left, right], "pred": str,
    "entails": [{"pred": str, "score": float}, ...]}``. Edge targets are
    vertices too, whether or not they appear on a line of their own.
    Duplicate (source, target) pairs are an error, not last-wins.
    """
    path = Path(path)
    graph = EntailmentGraph(name=name if name is not None else path.stem)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise FormatError(f"invalid JSON ({e.msg})", path=str(path), line=lineno) from e
            try:
                _load_record(graph, record)
            except (PredicateParseError, SignatureMismatchError, ValueError, KeyError, TypeError) as e:
                raise FormatError(str(e) or repr(e), path=str(path), line=lineno) from e
    return graph


def _load_record(graph: EntailmentGraph, record: dict) -> None:
    types = record["types"]
    if not (isinstance(types, list) and len(types) == 2):
        raise ValueError(f"'types' must be a two-element list, got {types!r}")
    signature = TypeSignature(_check_type_name(str(types[0])), _check_type_name(str(types[1])))
    source = Predicate.parse(str(record["pred"]), signature)
    sg = graph.get_or_create(signature)
    sg.add_vertex(source)
    entails = record.get("entails", [])
    if not isinstance(entails, list):
        raise ValueError("'entails' must be a list")
    for entry in entails:
        target = Predicate.parse(str(entry["pred"]), signature)
        score = entry["score"]
        if not isinstance(score, (int, float)) or isinstance(score, bool):
            raise ValueError(f"edge score must be a number, got {score!r}")
        sg.add_edge(source, target, float(score))


def serialize_graph(graph: EntailmentGraph, path: str | Path) -> None:
    """Write the canonical JSON-lines form: subgraphs, vertices, and edge
    lists all sorted, so serialize -> load -> serialize is byte-stable."""
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for signature in sorted(graph.subgraphs, key=lambda s: (s.left, s.right)):
            sg = graph.subgraphs[signature]
            for rel in sorted(sg.vertices):
                out = sg.edges.get(rel, {})
                record = {
                    "types": [signature.left, signature.right],
                    "pred": rel,
                    "entails": [
                        {"pred": t, "score": out[t]} for t in sorted(out)
                    ],
                }
                fh.write(json.dumps(record) + "\n")
