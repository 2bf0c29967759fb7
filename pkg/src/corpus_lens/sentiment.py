"""Sentence polarity scoring against a ``surface:reading:POS:score`` lexicon."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import EmptyLexicon, NoScoredSentences
from .tokenize import Token

logger = logging.getLogger(__name__)

BIN_WIDTH = 0.025


class Label(str, enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    UNSCORED = "Unscored"


@dataclass
class PolarityLexicon:
    entries: dict[tuple[str, str], float]
    surface_fallback: dict[str, float]
    skipped: int = 0

    def __post_init__(self):
        for v in list(self.entries.values()) + list(self.surface_fallback.values()):
            if not -1.0 <= v <= 1.0:
                raise ValueError(f"polarity {v} outside [-1, 1]")

    def __len__(self):
        return len(self.entries)

    def lookup(self, token: Token) -> float | None:
        v = self.entries.get((token.lemma, token.pos))
        if v is None:
            v = self.surface_fallback.get(token.surface)
        return v


def parse_polarity_lines(lines: Iterable[str]) -> PolarityLexicon:
    entries: dict[tuple[str, str], float] = {}
    fallback: dict[str, float] = {}
    skipped = 0
    for line in lines:
        line = line.strip()
        if not line:
            continue
        parts = line.rsplit(":", 3)
        if len(parts) != 4 or not parts[0]:
            skipped += 1
            continue
        surface, _reading, pos, raw = parts
        try:
            score = float(raw)
        except ValueError:
            skipped += 1
            continue
        if not math.isfinite(score) or not -1.0 <= score <= 1.0:
            skipped += 1
            continue
        entries.setdefault((surface, pos), score)
        fallback.setdefault(surface, score)
    if skipped:
        logger.warning("polarity lexicon: skipped %d malformed records", skipped)
    if not entries:
        raise EmptyLexicon("polarity lexicon has no valid records")
    return PolarityLexicon(entries, fallback, skipped)


def load_polarity_lexicon(path) -> PolarityLexicon:
    # the published table ships in Shift_JIS as well; only UTF-8 is accepted here
    text = Path(path).read_text(encoding="utf-8-sig")
    return parse_polarity_lines(text.splitlines())


@dataclass(frozen=True)
class SentenceScore:
    chapter_index: int
    ordinal: int
    matched_count: int
    score: float | None
    label: Label


def label_for(score: float | None) -> Label:
    if score is None:
        return Label.UNSCORED
    if score > 0:
        return Label.POSITIVE
    if score < 0:
        return Label.NEGATIVE
    return Label.NEUTRAL


def score_sentence(tokens: Sequence[Token], lexicon: PolarityLexicon,
                   chapter_index: int = 0, ordinal: int = 0) -> SentenceScore:
    values = [v for v in (lexicon.lookup(t) for t in tokens) if v is not None]
    score = math.fsum(values) / len(values) if values else None
    return SentenceScore(chapter_index, ordinal, len(values), score, label_for(score))


def score_corpus(tokenized, lexicon: PolarityLexicon) -> list[SentenceScore]:
    return [
        score_sentence(toks, lexicon, s.chapter_index, s.ordinal)
        for s, toks in zip(tokenized.corpus.sentences, tokenized.tokens)
    ]


def word_polarity_counts(tokenized, lexicon: PolarityLexicon) -> dict[str, int]:
    """Matched-token counts by sign, the word-level view of the same corpus."""
    out = {"negative": 0, "positive": 0, "neutral": 0}
    for toks in tokenized.tokens:
        for t in toks:
            v = lexicon.lookup(t)
            if v is None:
                continue
            out["negative" if v < 0 else "positive" if v > 0 else "neutral"] += 1
    return out


@dataclass(frozen=True)
class SentimentHistogram:
    bin_width: float
    counts: tuple[int, ...]

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(-1.0, 1.0, len(self.counts) + 1)

    @property
    def total(self) -> int:
        return sum(self.counts)


def n_bins_for(bin_width: float) -> int:
    n = round(2.0 / bin_width)
    if bin_width <= 0 or abs(n * bin_width - 2.0) > 1e-9:
        raise ValueError(f"bin width {bin_width} must divide [-1, 1] evenly")
    return n


def bin_index(score: float, n_bins: int) -> int:
    # (s + 1) * n/2 rather than (s + 1) / width: the factor is exact in binary
    return min(max(math.floor((score + 1.0) * (n_bins / 2)), 0), n_bins - 1)


def histogram(scores: Iterable[SentenceScore], bin_width: float = BIN_WIDTH) -> SentimentHistogram:
    n = n_bins_for(bin_width)
    counts = [0] * n
    for s in scores:
        if s.score is not None:
            counts[bin_index(s.score, n)] += 1
    return SentimentHistogram(bin_width, tuple(counts))


@dataclass(frozen=True)
class SeriesRow:
    chapter_index: int
    mean: float
    count: int
    flagged: bool = False


@dataclass(frozen=True)
class ChapterSeries:
    rows: tuple[SeriesRow, ...]


def chapter_series(grouped: Mapping[int, Iterable[SentenceScore | float]]) -> ChapterSeries:
    """Mean scored-sentence polarity per chapter, in ascending chapter order.

    Values may be SentenceScore objects or bare floats; unscored entries are
    ignored and a chapter with nothing scored gets mean 0 and ``flagged``.
    """
    rows = []
    for idx in sorted(grouped):
        vals = []
        for s in grouped[idx]:
            v = s.score if isinstance(s, SentenceScore) else s
            if v is not None:
                vals.append(v)
        if vals:
            rows.append(SeriesRow(idx, math.fsum(vals) / len(vals), len(vals)))
        else:
            rows.append(SeriesRow(idx, 0.0, 0, True))
    return ChapterSeries(tuple(rows))


def group_by_chapter(scores: Iterable[SentenceScore], chapters: Iterable[int] = ()) -> dict:
    out: dict[int, list[SentenceScore]] = {c: [] for c in chapters}
    for s in scores:
        out.setdefault(s.chapter_index, []).append(s)
    return out


def _scored(scores) -> list[float]:
    vals = [s.score if isinstance(s, SentenceScore) else s for s in scores]
    return [v for v in vals if v is not None]


def polarity_fractions(scores) -> dict[str, float]:
    vals = _scored(scores)
    if not vals:
        raise NoScoredSentences("no scored sentences")
    n = len(vals)
    neg = sum(1 for v in vals if v < 0)
    pos = sum(1 for v in vals if v > 0)
    return {"negative": neg / n, "positive": pos / n, "neutral": (n - neg - pos) / n}


def negativity_fraction(scores) -> float:
    return polarity_fractions(scores)["negative"]
