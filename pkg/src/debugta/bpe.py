"""Byte-level BPE tokenizer loaded from a standard vocab.json + merges.txt pair.

Matches the common two-file format: ``merges.txt`` lists merge rules in
priority order ("token_a token_b" per line, optional "#version" header) and
``vocab.json`` maps token strings to ids. Only the merge ranks drive
tokenization; the vocab is used for id lookup.
"""

from __future__ import annotations

import json
from pathlib import Path

try:  # \p{L}/\p{N} classes need the third-party regex module
    import regex as _re

    _PATTERN = _re.compile(
        r"'s|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+"
    )
except ImportError:  # pragma: no cover - ASCII-equivalent fallback
    import re as _re

    _PATTERN = _re.compile(
        r"'s|'t|'re|'ve|'m|'ll|'d| ?[A-Za-z]+| ?[0-9]+| ?[^\sA-Za-z0-9]+|\s+(?!\S)|\s+"
    )


def _bytes_to_unicode() -> dict[int, str]:
    """Reversible byte -> printable-unicode map used by byte-level BPE vocabs."""
    bs = (
        list(range(ord("!"), ord("~") + 1))
        + list(range(ord("\xa1"), ord("\xac") + 1))
        + list(range(ord("\xae"), ord("\xff") + 1))
    )
    cs = bs[:]
    n = 0
    for b in range(256):
        if b not in bs:
            bs.append(b)
            cs.append(256 + n)
            n += 1
    return dict(zip(bs, (chr(c) for c in cs)))


_BYTE_MAP = _bytes_to_unicode()


def _pairs(word: tuple[str, ...]) -> set[tuple[str, str]]:
    return set(zip(word, word[1:]))


class BpeTokenizer:
    tokenizer_id = "bpe"

    def __init__(self, vocab_path: str | Path, merges_path: str | Path):
        self.vocab: dict[str, int] = json.loads(
            Path(vocab_path).read_text(encoding="utf-8")
        )
        ranks: dict[tuple[str, str], int] = {}
        for line in Path(merges_path).read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            left, _, right = line.partition(" ")
            if right:
                ranks[(left, right)] = len(ranks)
        self.merge_ranks = ranks
        self._cache: dict[str, tuple[str, ...]] = {}

    def _bpe(self, piece: str) -> tuple[str, ...]:
        cached = self._cache.get(piece)
        if cached is not None:
            return cached
        word: tuple[str, ...] = tuple(piece)
        while len(word) > 1:
            candidates = _pairs(word)
            best = min(
                candidates,
                key=lambda p: self.merge_ranks.get(p, float("inf")),
            )
            if best not in self.merge_ranks:
                break
            first, second = best
            merged: list[str] = []
            i = 0
            while i < len(word):
                if i < len(word) - 1 and word[i] == first and word[i + 1] == second:
                    merged.append(first + second)
                    i += 2
                else:
                    merged.append(word[i])
                    i += 1
            word = tuple(merged)
        self._cache[piece] = word
        return word

    def tokenize(self, code: str) -> list[str]:
        tokens: list[str] = []
        for piece in _PATTERN.findall(code):
            mapped = "".join(_BYTE_MAP[b] for b in piece.encode("utf-8"))
            tokens.extend(self._bpe(mapped))
        return tokens

    def encode_ids(self, code: str) -> list[int]:
        return [self.vocab[tok] for tok in self.tokenize(code) if tok in self.vocab]
