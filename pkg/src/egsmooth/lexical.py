"""Lexical taxonomy lookups for hypernym/hyponym predicate substitution.

The on-disk contract is JSON lines, one word per line:

    {"word": w, "hypernyms": [[sense1 words], [sense2 words], ...],
     "hyponyms": [[...], ...]}

Sense lists are ordered by sense number. ``import_wordnet_database``
converts the standard WNDB ``index.pos``/``data.pos`` file pair into this
format so a real lexicon can be dropped in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FormatError
from .graph import Predicate, PredicatePath

HYPERNYM = "hypernym"
HYPONYM = "hyponym"
_RELATIONS = (HYPERNYM, HYPONYM)


@dataclass
class LexicalDB:
    # word -> relation -> ordered sense lists, each a list of words
    entries: dict[str, dict[str, list[list[str]]]] = field(default_factory=dict)

    def senses(self, word: str, relation: str) -> list[list[str]]:
        if relation not in _RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        return self.entries.get(word, {}).get(relation + "s", [])

    def add(self, word: str, hypernyms: list[list[str]], hyponyms: list[list[str]]) -> None:
        if not word:
            raise ValueError("empty word")
        self.entries[word] = {"hypernyms": hypernyms, "hyponyms": hyponyms}

    def __len__(self) -> int:
        return len(self.entries)


def load_lexdb(path: str | Path) -> LexicalDB:
    path = Path(path)
    db = LexicalDB()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                word = record["word"]
                if not isinstance(word, str) or not word:
                    raise ValueError(f"bad word {word!r}")
                hyper = _check_senses(record.get("hypernyms", []))
                hypo = _check_senses(record.get("hyponyms", []))
            except (json.JSONDecodeError, ValueError, KeyError, TypeError) as e:
                raise FormatError(str(e), path=str(path), line=lineno) from e
            db.add(word, hyper, hypo)
    return db


def _check_senses(senses) -> list[list[str]]:
    if not isinstance(senses, list):
        raise ValueError("sense lists must be a list of lists")
    out = []
    for sense in senses:
        if not isinstance(sense, list) or not all(isinstance(w, str) and w for w in sense):
            raise ValueError(f"bad sense entry {sense!r}")
        out.append(list(sense))
    return out


def save_lexdb(db: LexicalDB, path: str | Path) -> None:
    with open(Path(path), "w", encoding="utf-8") as fh:
        for word in sorted(db.entries):
            record = {"word": word, **db.entries[word]}
            fh.write(json.dumps(record) + "\n")


def lexical_replacements(p: Predicate, relation: str, db: LexicalDB) -> list[Predicate]:
    """Substitute first-sense taxonomy neighbors of the head word into p.

    The head word is the first word of the relation (``receive`` in
    ``(receive.2,receive.from.2)``). Every occurrence of it in the relation
    is replaced, keeping slot indices, particles, and types intact:
    hyponym(receive) = inherit turns ``(receive.2,receive.from.2)#a#b``
    into ``(inherit.2,inherit.from.2)#a#b``. Multiword replacements are
    skipped. Absent words yield an empty list.
    """
    head = p.head_word()
    senses = db.senses(head, relation)
    if not senses:
        return []
    out: list[Predicate] = []
    seen: set[str] = set()
    for word in senses[0]:
        if " " in word or "_" in word:
            continue  # single-head-word substitution only
        candidate = _substitute_head(p, head, word)
        if candidate.relation not in seen:
            seen.add(candidate.relation)
            out.append(candidate)
    return out


def _substitute_head(p: Predicate, head: str, replacement: str) -> Predicate:
    paths = tuple(
        PredicatePath(tuple(replacement if w == head else w for w in path.words), path.slot)
        for path in p.paths
    )
    t1, t2 = p.signature.type_tokens()
    rel = f"({paths[0].render()},{paths[1].render()})#{t1}#{t2}"
    return Predicate(rel, p.signature, paths)  # type: ignore[arg-type]


# ---------------------------------------------------------------------------
# WNDB import
# ---------------------------------------------------------------------------

_POINTER_FOR = {HYPERNYM: "@", HYPONYM: "~"}


def import_wordnet_database(index_path: str | Path, data_path: str | Path) -> LexicalDB:
    """Build a LexicalDB from a WNDB-format index/data file pair.

    Reads ``index.pos`` for lemma -> synset offsets in sense order, and
    ``data.pos`` for synset members and @/~ (hypernym/hyponym) pointers.
    Each sense of a lemma contributes one sense list: the words of all
    synsets reachable by one pointer hop, in pointer order. Underscores in
    multiword lemmas are preserved (and later skipped by substitution).
    """
    synsets = _parse_wndb_data(Path(data_path))
    db = LexicalDB()
    with open(index_path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if raw.startswith("  ") or not raw.strip():
                continue  # license header lines
            fields = raw.split()
            try:
                lemma = fields[0]
                synset_cnt = int(fields[2])
                p_cnt = int(fields[3])
                offsets = [int(tok) for tok in fields[4 + p_cnt + 2 :]]
                if len(offsets) != synset_cnt:
                    raise ValueError(
                        f"lemma {lemma!r}: {len(offsets)} offsets, expected {synset_cnt}"
                    )
            except (IndexError, ValueError) as e:
                raise FormatError(str(e), path=str(index_path), line=lineno) from e
            hyper: list[list[str]] = []
            hypo: list[list[str]] = []
            for offset in offsets:
                synset = synsets.get(offset)
                if synset is None:
                    raise FormatError(
                        f"lemma {lemma!r} references unknown synset {offset}",
                        path=str(index_path),
                        line=lineno,
                    )
                hyper.append(_pointer_words(synset, synsets, "@"))
                hypo.append(_pointer_words(synset, synsets, "~"))
            db.add(lemma, hyper, hypo)
    return db


def _parse_wndb_data(path: Path) -> dict[int, dict]:
    synsets: dict[int, dict] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if raw.startswith("  ") or not raw.strip():
                continue
            fields = raw.split()
            try:
                offset = int(fields[0])
                w_cnt = int(fields[3], 16)
                words = [fields[4 + 2 * i] for i in range(w_cnt)]
                p_base = 4 + 2 * w_cnt
                p_cnt = int(fields[p_base])
                pointers = []
                for i in range(p_cnt):
                    sym = fields[p_base + 1 + 4 * i]
                    target = int(fields[p_base + 2 + 4 * i])
                    pos = fields[p_base + 3 + 4 * i]
                    pointers.append((sym, target, pos))
            except (IndexError, ValueError) as e:
                raise FormatError(str(e), path=str(path), line=lineno) from e
            synsets[offset] = {"words": words, "pointers": pointers}
    return synsets


def _pointer_words(synset: dict, synsets: dict[int, dict], symbol: str) -> list[str]:
    words: list[str] = []
    seen: set[str] = set()
    for sym, target, _pos in synset["pointers"]:
        if sym != symbol:
            continue
        for w in synsets.get(target, {}).get("words", []):
            if w not in seen:
                seen.add(w)
                words.append(w)
    return words
