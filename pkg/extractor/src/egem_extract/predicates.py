"""Relation-string parsing and sentence rendering for the extractor.

Implements the same on-disk contracts as the graph consumer: relation
strings ``(word.slot,word.slot)#type1#type2`` are canonicalized (equal base
types get _1/_2 suffixes) and rendered to template sentences where the
argument types stand in as generic words. Rendering here additionally
tracks character spans of the predicate words, which drive subword
alignment during pooling.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

_TYPE_SUFFIX = re.compile(r"_[12]$")


class RelationError(ValueError):
    pass


@dataclass(frozen=True)
class ParsedRelation:
    relation: str  # canonical string
    paths: tuple[tuple[tuple[str, ...], int], tuple[tuple[str, ...], int]]
    left_type: str
    right_type: str


def parse_relation(text: str) -> ParsedRelation:
    text = text.strip()
    pieces = text.split("#")
    if len(pieces) != 3:
        raise RelationError(f"expected (paths)#type1#type2, got {text!r}")
    body, t1, t2 = pieces
    left, right = _TYPE_SUFFIX.sub("", t1), _TYPE_SUFFIX.sub("", t2)
    if not left or not right or " " in left or " " in right:
        raise RelationError(f"bad type tokens in {text!r}")
    if not (body.startswith("(") and body.endswith(")")):
        raise RelationError(f"relation body must be parenthesized: {text!r}")
    tokens = body[1:-1].split(",")
    if len(tokens) != 2:
        raise RelationError(f"expected two comma-separated paths: {text!r}")
    paths = []
    for token in tokens:
        parts = token.split(".")
        if len(parts) < 2 or parts[-1] not in ("1", "2") or not all(parts[:-1]):
            raise RelationError(f"bad path {token!r} in {text!r}")
        paths.append((tuple(parts[:-1]), int(parts[-1])))
    if left == right:
        suffix = f"#{left}_1#{left}_2"
    else:
        suffix = f"#{left}#{right}"
    rendered_paths = ",".join(".".join(w) + f".{s}" for w, s in paths)
    return ParsedRelation(f"({rendered_paths}){suffix}", (paths[0], paths[1]), left, right)


@dataclass(frozen=True)
class RenderedSentence:
    text: str
    predicate_char_spans: tuple[tuple[int, int], ...]  # spans of predicate words


def render(parsed: ParsedRelation) -> RenderedSentence:
    """Template sentence plus character spans of the predicate words.

    Slot 1 places the argument before the path words, slot 2 after; the
    second path contributes only the words beyond its shared prefix with
    the first.
    """
    if parsed.left_type == parsed.right_type:
        arg1, arg2 = f"{parsed.left_type}_1", f"{parsed.left_type}_2"
    else:
        arg1, arg2 = parsed.left_type, parsed.right_type
    (words1, slot1), (words2, slot2) = parsed.paths
    shared = 0
    while shared < min(len(words1), len(words2)) and words1[shared] == words2[shared]:
        shared += 1
    remainder = words2[shared:]

    tokens: list[tuple[str, bool]] = []
    if slot1 == 1:
        tokens.append((arg1, False))
        tokens.extend((w, True) for w in words1)
    else:
        tokens.extend((w, True) for w in words1)
        tokens.append((arg1, False))
    if slot2 == 1:
        tokens.append((arg2, False))
        tokens.extend((w, True) for w in remainder)
    else:
        tokens.extend((w, True) for w in remainder)
        tokens.append((arg2, False))

    spans = []
    pieces = []
    cursor = 0
    for word, is_predicate in tokens:
        if pieces:
            cursor += 1  # joining space
        if is_predicate:
            spans.append((cursor, cursor + len(word)))
        pieces.append(word)
        cursor += len(word)
    return RenderedSentence(" ".join(pieces), tuple(spans))


def predicates_from_graph(path: str | Path) -> list[str]:
    """All unique canonical predicate strings in a graph JSONL file
    (declared vertices and edge targets alike), sorted."""
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                seen.add(parse_relation(str(record["pred"])).relation)
                for entry in record.get("entails", []):
                    seen.add(parse_relation(str(entry["pred"])).relation)
            except (json.JSONDecodeError, KeyError, RelationError) as e:
                raise RelationError(f"{path}:{lineno}: {e}") from e
    return sorted(seen)


def predicates_from_file(path: str | Path) -> list[str]:
    """Extra predicates, one relation string per line (blank lines and
    #-comments are skipped)."""
    out: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#") and not line.startswith("("):
                continue
            out.add(parse_relation(line).relation)
    return sorted(out)
