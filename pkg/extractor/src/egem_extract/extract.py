"""Encode predicate template sentences with a masked LM and pool the
subword vectors of the predicate words.

Each predicate is rendered to its sentence, the sentence is tokenized with
character offsets, and the final vector is the arithmetic mean of the
chosen hidden layer over exactly the subword tokens that overlap the
predicate words' character spans. Argument-type words, special tokens, and
padding never contribute: special and padding tokens carry zero-width
offsets, which cannot overlap a non-empty span.

Inference is deterministic: unique predicates are encoded once, batches are
formed over the sorted unique list, and torch runs single-threaded in eval
mode, so re-running a job reproduces the output file byte for byte.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .predicates import RelationError, parse_relation, render

log = logging.getLogger("egem_extract")


@dataclass
class ExtractionJob:
    predicates: list[str]
    model: str
    out_path: str
    batch_size: int = 32
    layer: str = "last"  # "last" or an index into hidden_states (0 = embeddings)
    lowercase: bool = False

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")
        if self.layer != "last":
            int(self.layer)  # raises early when not an index


@dataclass
class TokenAudit:
    """Which tokens were pooled for one predicate (for alignment checks)."""

    relation: str
    sentence: str
    predicate_char_spans: tuple[tuple[int, int], ...]
    pooled: list[tuple[int, str, tuple[int, int]]] = field(default_factory=list)


def _overlaps(span: tuple[int, int], start: int, end: int) -> bool:
    return max(span[0], start) < min(span[1], end)


class Encoder:
    def __init__(self, model_name: str, layer: str = "last", lowercase: bool = False):
        self.tokenizer = AutoTokenizer.from_pretrained(model_name)
        if not self.tokenizer.is_fast:
            raise RuntimeError("a fast tokenizer is required for character-offset alignment")
        self.model = AutoModel.from_pretrained(model_name)
        self.model.eval()
        self.layer = layer
        self.lowercase = lowercase
        self.dim = int(self.model.config.hidden_size)

    def encode_batch(self, sentences: list[str], spans: list[tuple[tuple[int, int], ...]]):
        """Returns (vectors (n, dim) float32, pooled token info per sentence)."""
        encoded = self.tokenizer(
            sentences,
            padding=True,
            truncation=True,
            return_tensors="pt",
            return_offsets_mapping=True,
        )
        offsets = encoded.pop("offset_mapping")
        with torch.no_grad():
            output = self.model(**encoded, output_hidden_states=True)
        if self.layer == "last":
            hidden = output.hidden_states[-1]
        else:
            hidden = output.hidden_states[int(self.layer)]

        vectors = np.empty((len(sentences), self.dim), dtype=np.float32)
        pooled_info = []
        for row, sentence_spans in enumerate(spans):
            token_ids = []
            for tok in range(offsets.shape[1]):
                start, end = int(offsets[row, tok, 0]), int(offsets[row, tok, 1])
                if start == end:
                    continue  # special token or padding
                if any(_overlaps(s, start, end) for s in sentence_spans):
                    token_ids.append(tok)
            if not token_ids:
                raise RelationError(
                    f"no subword tokens aligned to predicate words in {sentences[row]!r}"
                )
            pooled = hidden[row, token_ids].mean(dim=0)
            vectors[row] = pooled.to(torch.float32).numpy()
            pooled_info.append(
                [
                    (tok, self.tokenizer.decode(encoded["input_ids"][row, tok]),
                     (int(offsets[row, tok, 0]), int(offsets[row, tok, 1])))
                    for tok in token_ids
                ]
            )
        return vectors, pooled_info


def run_job(job: ExtractionJob) -> tuple[dict[str, np.ndarray], list[TokenAudit]]:
    """Encode every unique predicate; returns vectors plus pooling audits.

    Predicates that fail to parse or align are logged and skipped.
    """
    torch.set_num_threads(1)  # fixed reduction order: bit-stable reruns
    encoder = Encoder(job.model, layer=job.layer, lowercase=job.lowercase)

    parsed = {}
    for raw in job.predicates:
        try:
            p = parse_relation(raw)
        except RelationError as e:
            log.warning("skipping unparsable predicate %r: %s", raw, e)
            continue
        parsed.setdefault(p.relation, p)

    relations = sorted(parsed)
    vectors: dict[str, np.ndarray] = {}
    audits: list[TokenAudit] = []
    for lo in range(0, len(relations), job.batch_size):
        batch = relations[lo : lo + job.batch_size]
        sentences, spans = [], []
        for rel in batch:
            rendered = render(parsed[rel])
            text = rendered.text.lower() if job.lowercase else rendered.text
            sentences.append(text)
            spans.append(rendered.predicate_char_spans)
        try:
            batch_vecs, pooled_info = encoder.encode_batch(sentences, spans)
        except RelationError as e:
            log.warning("batch alignment failure, encoding one by one: %s", e)
            batch_vecs, pooled_info = _encode_singly(encoder, sentences, spans)
        for i, rel in enumerate(batch):
            if batch_vecs[i] is None:
                continue
            vectors[rel] = batch_vecs[i]
            audits.append(
                TokenAudit(rel, sentences[i], spans[i], pooled_info[i])
            )
    return vectors, audits


def _encode_singly(encoder: Encoder, sentences, spans):
    vecs: list[np.ndarray | None] = []
    infos = []
    for sentence, span in zip(sentences, spans):
        try:
            v, info = encoder.encode_batch([sentence], [span])
            vecs.append(v[0])
            infos.append(info[0])
        except RelationError as e:
            log.warning("skipping %r: %s", sentence, e)
            vecs.append(None)
            infos.append([])
    return vecs, infos
