"""Morpheme tokens: greedy longest-match segmentation and analyzer-output import.

The interchange format is the usual Japanese analyzer text output::

    源氏\t名詞,固有名詞,人名,一般,*,*,源氏,ゲンジ,ゲンジ
    EOS

with an optional ``#CHAPTER <n>`` line opening each chapter.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import Corpus
from .errors import AlignmentError, MalformedRecord

UNKNOWN = "未知語"
CONTENT_POS = frozenset({"名詞", "動詞", "形容詞"})

# coarse first-field tags of the IPA and UniDic tag sets
POS_TAGS = frozenset({
    "名詞", "動詞", "形容詞", "副詞", "連体詞", "接続詞", "感動詞", "助詞", "助動詞",
    "記号", "接頭詞", "フィラー", "その他", UNKNOWN,
    "代名詞", "形状詞", "接頭辞", "接尾辞", "補助記号", "空白",
})

_CHAPTER_RE = re.compile(r"^#CHAPTER\s+(\d+)\s*$")


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    pos: str
    lemma: str

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")


class SegmentationLexicon:
    """Surface form -> (pos, lemma) lookup used by the longest-match tokenizer."""

    def __init__(self, entries: dict[str, tuple[str, str]]):
        if "" in entries:
            raise ValueError("segmentation lexicon cannot contain an empty surface")
        self.entries = dict(entries)
        # longest first, so the scan can stop at the first hit
        self.lengths = sorted({len(k) for k in self.entries}, reverse=True)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, surface):
        return surface in self.entries

    @classmethod
    def from_words(cls, words: Iterable[str], pos: str = "名詞") -> "SegmentationLexicon":
        return cls({w: (pos, w) for w in words})

    @classmethod
    def load(cls, path) -> "SegmentationLexicon":
        """Read ``surface<TAB>pos<TAB>lemma`` lines; a missing lemma defaults to the surface."""
        entries = {}
        text = Path(path).read_text(encoding="utf-8-sig")
        for no, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) < 2 or not cols[0]:
                raise MalformedRecord(no, line, "expected surface<TAB>pos[<TAB>lemma]")
            pos = cols[1].strip()
            if pos not in POS_TAGS:
                raise MalformedRecord(no, line, f"unknown POS tag {pos!r}")
            lemma = cols[2].strip() if len(cols) > 2 and cols[2].strip() else cols[0]
            entries[cols[0]] = (pos, lemma)
        return cls(entries)


@dataclass(frozen=True)
class TokenizedCorpus:
    corpus: Corpus
    tokens: tuple[tuple[Token, ...], ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.corpus.sentences):
            raise AlignmentError(
                f"{len(self.tokens)} token lists for {len(self.corpus.sentences)} sentences"
            )

    def by_chapter(self) -> dict[int, list[tuple[Token, ...]]]:
        out = {ch.index: [] for ch in self.corpus.chapters}
        for sent, toks in zip(self.corpus.sentences, self.tokens):
            out[sent.chapter_index].append(toks)
        return out

    def chapter_lemmas(self) -> dict[int, list[str]]:
        return {
            idx: [t.lemma for toks in sents for t in toks]
            for idx, sents in self.by_chapter().items()
        }

    def to_dict(self) -> dict:
        return {
            "corpus": self.corpus.to_dict(),
            "tokens": [[[t.surface, t.pos, t.lemma] for t in toks] for toks in self.tokens],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "TokenizedCorpus":
        data = json.loads(text)
        corpus = Corpus.from_dict(data["corpus"])
        toks = tuple(tuple(Token(*t) for t in sent) for sent in data["tokens"])
        return cls(corpus, toks)


def tokenize_longest_match(sentence: str, lexicon: SegmentationLexicon) -> list[Token]:
    if not len(lexicon):
        raise ValueError("segmentation lexicon is empty")
    entries = lexicon.entries
    lengths = lexicon.lengths
    out = []
    i, n = 0, len(sentence)
    while i < n:
        for L in lengths:
            if i + L > n:
                continue
            piece = sentence[i:i + L]
            hit = entries.get(piece)
            if hit is not None:
                out.append(Token(piece, hit[0], hit[1]))
                i += L
                break
        else:
            ch = sentence[i]
            out.append(Token(ch, UNKNOWN, ch))
            i += 1
    return out


def tokenize_corpus(corpus: Corpus, lexicon: SegmentationLexicon) -> TokenizedCorpus:
    toks = tuple(tuple(tokenize_longest_match(s.text, lexicon)) for s in corpus.sentences)
    return TokenizedCorpus(corpus, toks)


def parse_record(line: str, line_no: int = 0) -> Token:
    if "\t" not in line:
        raise MalformedRecord(line_no, line)
    surface, feature = line.split("\t", 1)
    if not surface:
        raise MalformedRecord(line_no, line, "empty surface")
    fields = next(csv.reader([feature]))
    pos = fields[0] if fields and fields[0] else UNKNOWN
    if pos not in POS_TAGS:
        raise MalformedRecord(line_no, line, f"unknown POS tag {pos!r}")
    lemma = fields[6] if len(fields) > 6 and fields[6] not in ("", "*") else surface
    return Token(surface, pos, lemma)


def read_interchange(lines: Iterable[str]) -> list[tuple[int | None, list[Token]]]:
    """Parse interchange text into ``(chapter_marker, tokens)`` per sentence."""
    out = []
    chapter = None
    current: list[Token] | None = None
    for no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        if line == "EOS":
            out.append((chapter, current or []))
            current = None
            continue
        if not line.strip():
            continue
        m = _CHAPTER_RE.match(line)
        if m:
            if current:
                out.append((chapter, current))
                current = None
            chapter = int(m.group(1))
            continue
        if line.startswith("#") and "\t" not in line:
            continue
        tok = parse_record(line, no)
        if current is None:
            current = []
        current.append(tok)
    if current:
        out.append((chapter, current))
    return out


def import_tokens(stream, corpus: Corpus) -> TokenizedCorpus:
    """Align analyzer output with ``corpus`` sentence by sentence.

    ``stream`` is text or an iterable of lines. Without chapter markers the
    total sentence count must match; with markers every chapter must match.
    """
    lines = stream.splitlines() if isinstance(stream, str) else stream
    records = read_interchange(lines)
    expected = corpus.sentences
    markers = [c for c, _ in records if c is not None]
    if markers:
        if any(c is None for c, _ in records):
            raise AlignmentError("sentences appear before the first #CHAPTER marker")
        got: dict[int, int] = {}
        for c, _ in records:
            got[c] = got.get(c, 0) + 1
        want = {ch.index: len(ch.sentences) for ch in corpus.chapters}
        want = {k: v for k, v in want.items() if v}
        if got != want:
            bad = sorted(k for k in set(got) | set(want) if got.get(k) != want.get(k))
            raise AlignmentError(f"per-chapter sentence counts differ in chapters {bad[:10]}")
        # markers may arrive in any chapter order; stable-sort onto corpus order
        records = sorted(records, key=lambda r: r[0])
    elif len(records) != len(expected):
        raise AlignmentError(
            f"stream has {len(records)} sentences, corpus has {len(expected)}"
        )
    return TokenizedCorpus(corpus, tuple(tuple(toks) for _, toks in records))


def filter_pos(tokens: TokenizedCorpus, keep) -> TokenizedCorpus:
    keep = frozenset(keep)
    if not keep:
        raise ValueError("keep must name at least one POS tag")
    filtered = tuple(tuple(t for t in sent if t.pos in keep) for sent in tokens.tokens)
    return TokenizedCorpus(tokens.corpus, filtered)
