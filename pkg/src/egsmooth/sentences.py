"""Render typed predicates as short template sentences.

The argument types stand in as generic argument words, placed according to
the slot index on each path: slot 1 puts the argument before the path's
words, slot 2 after. The second path may share a word prefix with the
first (e.g. ``give`` / ``give to``); only its remainder is emitted.

    (join.1,join.2)#person#organization      -> "person join organization"
    (give.2,give.to.2)#medicine#person       -> "give medicine to person"
    (export.1,export.to.2)#location#location -> "location_1 export to location_2"
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Predicate


@dataclass(frozen=True)
class PredicateSentence:
    """A rendered sentence plus which whitespace tokens are predicate words."""

    text: str
    predicate_token_spans: tuple[int, ...]

    @property
    def tokens(self) -> list[str]:
        return self.text.split(" ")

    def predicate_words(self) -> list[str]:
        toks = self.tokens
        return [toks[i] for i in self.predicate_token_spans]


def render_sentence(p: Predicate) -> PredicateSentence:
    """Build the template sentence for a predicate.

    Returns the text and the indices of the tokens that belong to the
    predicate itself (the argument-type words are excluded).
    """
    arg1, arg2 = p.signature.rendered_args()
    path1, path2 = p.paths

    words1 = list(path1.words)
    words2 = list(path2.words)
    shared = 0
    while shared < min(len(words1), len(words2)) and words1[shared] == words2[shared]:
        shared += 1
    remainder2 = words2[shared:]

    tokens: list[str] = []
    pred_idx: list[int] = []

    def emit(word: str, is_predicate: bool) -> None:
        if is_predicate:
            pred_idx.append(len(tokens))
        tokens.append(word)

    if path1.slot == 1:
        emit(arg1, False)
        for w in words1:
            emit(w, True)
    else:
        for w in words1:
            emit(w, True)
        emit(arg1, False)

    if path2.slot == 1:
        emit(arg2, False)
        for w in remainder2:
            emit(w, True)
    else:
        for w in remainder2:
            emit(w, True)
        emit(arg2, False)

    return PredicateSentence(" ".join(tokens), tuple(pred_idx))
