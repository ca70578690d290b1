#!/usr/bin/env python3
"""Build the tiny BERT-style masked LM committed under tests/data/tiny-mlm.

The test environment has no model-hub access, so the test suite runs
against this seeded-random checkpoint; it exercises the full tokenizer /
offset-alignment / pooling path without pretending anything about vector
quality. Any real masked LM name or path works with the extractor CLI.

The WordPiece vocabulary contains every fixture word plus single-character
pieces (with ## continuations), so no sentence ever hits [UNK].
"""

from __future__ import annotations

import string
from pathlib import Path

import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers, processors
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

OUT_DIR = Path(__file__).resolve().parents[1] / "tests" / "data" / "tiny-mlm"

WORDS = [
    "person", "organization", "medicine", "location", "thing",
    "join", "give", "to", "export", "import",
    "beat", "defeat", "crush", "rout", "play", "compete", "dominate",
    "buy", "pay", "for", "shop", "win", "lose", "watch",
    "obliterate", "demolish", "receive", "from", "inherit",
]


def build_vocab() -> list[str]:
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    chars = list(string.ascii_lowercase) + list(string.digits) + ["_"]
    vocab += chars
    vocab += [f"##{c}" for c in chars]
    vocab += sorted(set(WORDS))
    return vocab


def build_tokenizer(vocab: list[str]) -> PreTrainedTokenizerFast:
    ids = {token: i for i, token in enumerate(vocab)}
    backend = Tokenizer(models.WordPiece(ids, unk_token="[UNK]"))
    backend.normalizer = normalizers.BertNormalizer(lowercase=True)
    backend.pre_tokenizer = pre_tokenizers.BertPreTokenizer()
    backend.post_processor = processors.TemplateProcessing(
        single="[CLS] $A [SEP]",
        pair="[CLS] $A [SEP] $B [SEP]",
        special_tokens=[("[CLS]", ids["[CLS]"]), ("[SEP]", ids["[SEP]"])],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=backend,
        unk_token="[UNK]",
        pad_token="[PAD]",
        cls_token="[CLS]",
        sep_token="[SEP]",
        mask_token="[MASK]",
    )


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    vocab = build_vocab()
    (OUT_DIR / "vocab.txt").write_text("\n".join(vocab) + "\n", encoding="utf-8")
    tokenizer = build_tokenizer(vocab)
    tokenizer.save_pretrained(OUT_DIR)

    config = BertConfig(
        vocab_size=len(vocab),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    torch.manual_seed(1234)
    model = BertModel(config)
    model.eval()
    model.save_pretrained(OUT_DIR)
    print(f"tiny masked LM written to {OUT_DIR} (vocab {len(vocab)}, dim 32)")


if __name__ == "__main__":
    main()
