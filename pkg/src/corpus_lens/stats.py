"""Per-POS frequency tables and chapter-level TF-IDF.

Chapters are the documents. ``tf`` is a term's share of its chapter's tokens,
``idf`` is the natural log of chapter count over the number of chapters that
contain the term (no smoothing), and ``tfidf`` is their product.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse

from .errors import EmptyDocument, UnknownTerm
from .tokenize import CONTENT_POS, TokenizedCorpus


@dataclass(frozen=True)
class FrequencyTable:
    pos: str
    rows: tuple[tuple[str, int], ...]


@dataclass(frozen=True)
class KeywordList:
    chapter_index: int
    rows: tuple[tuple[str, float], ...]


def _rank_key(item):
    return (-item[1], item[0])


def pos_frequency(tokens: TokenizedCorpus, pos: str, top_n: int) -> FrequencyTable:
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    counts = Counter(t.lemma for sent in tokens.tokens for t in sent if t.pos == pos)
    rows = sorted(counts.items(), key=_rank_key)[:top_n]
    return FrequencyTable(pos, tuple(rows))


class TermDocMatrix:
    """Sparse lemma-by-chapter count matrix.

    ``terms`` is sorted by code point, ``docs`` holds chapter indices in corpus
    order, and ``counts[i, j]`` is the number of times term ``i`` occurs in
    chapter ``j``.
    """

    def __init__(self, terms: Sequence[str], docs: Sequence[int], counts: sparse.spmatrix):
        self.terms = tuple(terms)
        self.docs = tuple(docs)
        self.counts = sparse.csc_matrix(counts, dtype=np.int64)
        self.counts.eliminate_zeros()
        if self.counts.shape != (len(self.terms), len(self.docs)):
            raise ValueError("count matrix shape does not match terms x docs")
        if self.counts.nnz and self.counts.data.min() < 1:
            raise ValueError("counts must be non-negative")
        self._term_idx = {t: i for i, t in enumerate(self.terms)}
        self._doc_idx = {d: j for j, d in enumerate(self.docs)}
        self.doc_lengths = np.asarray(self.counts.sum(axis=0)).ravel()
        self.doc_freq = np.diff(self.counts.tocsr().indptr)

    @classmethod
    def from_documents(cls, docs: Mapping[int, Sequence[str]]) -> "TermDocMatrix":
        """Build from ``{chapter_index: [lemma, ...]}`` (insertion order kept)."""
        doc_ids = list(docs)
        terms = sorted({t for toks in docs.values() for t in toks})
        index = {t: i for i, t in enumerate(terms)}
        rows, cols, vals = [], [], []
        for j, d in enumerate(doc_ids):
            for term, n in Counter(docs[d]).items():
                rows.append(index[term])
                cols.append(j)
                vals.append(n)
        counts = sparse.coo_matrix(
            (np.asarray(vals, dtype=np.int64), (rows, cols)), shape=(len(terms), len(doc_ids))
        )
        return cls(terms, doc_ids, counts)

    @classmethod
    def from_tokens(cls, tokens: TokenizedCorpus, keep_pos=CONTENT_POS) -> "TermDocMatrix":
        """``keep_pos=None`` keeps every POS."""
        docs = {}
        for idx, sents in tokens.by_chapter().items():
            docs[idx] = [
                t.lemma for toks in sents for t in toks if keep_pos is None or t.pos in keep_pos
            ]
        return cls.from_documents(docs)

    @property
    def shape(self):
        return self.counts.shape

    def count(self, term, doc) -> int:
        i = self._term_idx.get(term)
        if i is None:
            return 0
        return int(self.counts[i, self._doc(doc)])

    def _doc(self, doc) -> int:
        try:
            return self._doc_idx[doc]
        except KeyError:
            raise KeyError(f"unknown document {doc!r}") from None

    def document_frequency(self, term) -> int:
        i = self._term_idx.get(term)
        return 0 if i is None else int(self.doc_freq[i])

    # vectorised forms; each cell uses the same arithmetic as the scalar calls

    def tf_matrix(self) -> np.ndarray:
        if np.any(self.doc_lengths == 0):
            empty = [self.docs[j] for j in np.flatnonzero(self.doc_lengths == 0)]
            raise EmptyDocument(f"documents without tokens: {empty}")
        return self.counts.toarray() / self.doc_lengths[None, :]

    def idf_vector(self) -> np.ndarray:
        if np.any(self.doc_freq == 0):
            raise UnknownTerm("vocabulary contains a term with document frequency 0")
        n_docs = len(self.docs)
        return np.array([math.log(n_docs / df) for df in self.doc_freq.tolist()])

    def tfidf_matrix(self) -> np.ndarray:
        return self.tf_matrix() * self.idf_vector()[:, None]


def term_frequency(matrix: TermDocMatrix, term, doc) -> float:
    j = matrix._doc(doc)
    total = int(matrix.doc_lengths[j])
    if total == 0:
        raise EmptyDocument(f"document {doc!r} has no tokens")
    return matrix.count(term, doc) / total


def inverse_document_frequency(matrix: TermDocMatrix, term) -> float:
    df = matrix.document_frequency(term)
    if df == 0:
        raise UnknownTerm(f"term {term!r} occurs in no document")
    return math.log(len(matrix.docs) / df)


def tfidf(matrix: TermDocMatrix, term, doc) -> float:
    return term_frequency(matrix, term, doc) * inverse_document_frequency(matrix, term)


def chapter_keywords(matrix: TermDocMatrix, k: int) -> list[KeywordList]:
    """Top-``k`` positive-scoring terms per chapter; chapters without tokens get empty lists."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not matrix.terms:
        return [KeywordList(d, ()) for d in matrix.docs]
    idf = matrix.idf_vector()
    out = []
    csc = matrix.counts
    for j, doc in enumerate(matrix.docs):
        total = int(matrix.doc_lengths[j])
        if total == 0:
            out.append(KeywordList(doc, ()))
            continue
        lo, hi = csc.indptr[j], csc.indptr[j + 1]
        scored = []
        for i, n in zip(csc.indices[lo:hi].tolist(), csc.data[lo:hi].tolist()):
            score = (n / total) * idf[i]
            if score > 0:
                scored.append((matrix.terms[i], float(score)))
        scored.sort(key=_rank_key)
        out.append(KeywordList(doc, tuple(scored[:k])))
    return out
