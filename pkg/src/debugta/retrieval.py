"""Standard-code retrieval: tokenize programs and rank the pool with BM25.

The query is the erroneous program, the documents are the pool entries for
the same problem, and corpus statistics (document frequency, average length)
are computed over exactly that pool. The tokenizer is pluggable: the default
lexical tokenizer needs no data files; a byte-pair-encoding tokenizer can be
loaded from a standard vocab+merges pair instead.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from . import lexing
from .corpus import PoolEntry

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


class RetrievalError(Exception):
    pass


class EmptyPoolError(RetrievalError):
    """Raised when ranking is requested over an empty pool; callers should
    skip retrieval-dependent steps instead of treating this as fatal."""


class Tokenizer(Protocol):
    tokenizer_id: str

    def tokenize(self, code: str) -> list[str]: ...


class LexicalTokenizer:
    """C-family lexical tokenizer; one token per lexeme, literals husked."""

    tokenizer_id = "lexical"

    def tokenize(self, code: str) -> list[str]:
        return lexing.lexical_tokens(code)


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[str, ...]
    source_hash: str
    tokenizer_id: str = "lexical"


def tokenize(code: str, tokenizer: Tokenizer | None = None) -> TokenSequence:
    """Tokenize ``code`` deterministically with the given (default: lexical) tokenizer."""
    tok = tokenizer or LexicalTokenizer()
    digest = hashlib.sha256(code.encode("utf-8")).hexdigest()
    return TokenSequence(
        tokens=tuple(tok.tokenize(code)),
        source_hash=digest,
        tokenizer_id=tok.tokenizer_id,
    )


def bm25_rank(
    query: TokenSequence | Sequence[str],
    pool_docs: Sequence[TokenSequence | Sequence[str]],
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> list[tuple[int, float]]:
    """Score every document against the query and rank them.

    score(D) = sum over query tokens t of
        IDF(t) * f(t,D)*(k1+1) / (f(t,D) + k1*(1 - b + b*|D|/avgdl))
    with IDF(t) = ln((N - n_t + 0.5)/(n_t + 0.5) + 1). Query tokens are
    counted with multiplicity. Result is sorted by descending score, ties
    broken by ascending document index.
    """
    if not pool_docs:
        raise EmptyPoolError("empty pool")

    q_tokens = list(query.tokens if isinstance(query, TokenSequence) else query)
    docs = [
        list(d.tokens if isinstance(d, TokenSequence) else d) for d in pool_docs
    ]
    n_docs = len(docs)
    avgdl = sum(len(d) for d in docs) / n_docs

    doc_freq: Counter[str] = Counter()
    term_freqs = [Counter(d) for d in docs]
    for tf in term_freqs:
        doc_freq.update(tf.keys())

    idf = {
        t: math.log((n_docs - n + 0.5) / (n + 0.5) + 1.0)
        for t, n in doc_freq.items()
    }

    scores: list[tuple[int, float]] = []
    for i, tf in enumerate(term_freqs):
        dl = len(docs[i])
        norm = k1 * (1.0 - b + b * dl / avgdl) if avgdl > 0 else k1
        s = 0.0
        for t in q_tokens:
            f = tf.get(t, 0)
            if f == 0:
                continue
            s += idf[t] * (f * (k1 + 1.0)) / (f + norm)
        scores.append((i, s))

    scores.sort(key=lambda item: (-item[1], item[0]))
    return scores


@dataclass
class RetrievalResult:
    entry: PoolEntry
    score: float
    ranking: list[tuple[str, float]] = field(default_factory=list)
    tokenizer_id: str = "lexical"


def code_search(
    erroneous_code: str,
    pool: Sequence[PoolEntry],
    tokenizer: Tokenizer | None = None,
    k1: float = DEFAULT_K1,
    b: float = DEFAULT_B,
) -> RetrievalResult:
    """Select the pool entry most similar to the erroneous code.

    Ties on score are broken by ascending entry id, so two byte-identical
    pool entries resolve to the one with the smaller id.
    """
    if not pool:
        raise EmptyPoolError("empty pool: skip retrieval-dependent steps")

    tok = tokenizer or LexicalTokenizer()
    query = tokenize(erroneous_code, tok)
    docs = [tokenize(entry.code, tok) for entry in pool]
    index_scores = dict(bm25_rank(query, docs, k1=k1, b=b))

    ranked = sorted(
        ((pool[i], index_scores[i]) for i in range(len(pool))),
        key=lambda item: (-item[1], item[0].id),
    )
    best_entry, best_score = ranked[0]
    return RetrievalResult(
        entry=best_entry,
        score=best_score,
        ranking=[(entry.id, score) for entry, score in ranked],
        tokenizer_id=tok.tokenizer_id,
    )
