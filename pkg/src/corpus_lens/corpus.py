"""Chaptered corpus loading, sentence segmentation and corpus statistics.

Two on-disk layouts are understood:

* ``per-file``: one UTF-8 ``.txt`` per chapter, ordered by a numeric filename
  prefix (``01_kiritsubo.txt``); the title is the rest of the stem.
* ``single-file``: one UTF-8 file where a delimiter line (regex) opens each
  chapter; the title comes from the ``title`` group, else group 1, else the
  whole line.

A ``manifest.toml`` / ``manifest.json`` next to the chapters may instead list
``[[chapters]]`` tables with ``index``, ``file`` and ``title``.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DuplicateChapterIndex, EmptyCorpus, EncodingError

logger = logging.getLogger(__name__)

TERMINATORS = frozenset("。！？")
LAYOUTS = ("per-file", "single-file", "manifest")
DEFAULT_DELIMITER = r"^##\s*(?P<title>.*?)\s*$"
TITLE_LINE_MAX = 20

_PREFIX_RE = re.compile(r"^(\d+)[\s_\-.]*(.*)$")
_NEWLINES = str.maketrans("", "", "\r\n")


@dataclass(frozen=True)
class Sentence:
    text: str
    chapter_index: int
    ordinal: int


@dataclass(frozen=True)
class Chapter:
    index: int
    title: str
    raw_text: str
    sentences: tuple[Sentence, ...] = ()


@dataclass(frozen=True)
class Corpus:
    chapters: tuple[Chapter, ...]
    source_label: str = ""

    def __post_init__(self):
        if not self.chapters:
            raise EmptyCorpus("corpus has no chapters")
        for pos, ch in enumerate(self.chapters, start=1):
            if ch.index != pos:
                raise DuplicateChapterIndex(
                    f"chapter at position {pos} has index {ch.index}; indices must run 1..n"
                )

    @property
    def sentences(self) -> list[Sentence]:
        return [s for ch in self.chapters for s in ch.sentences]

    def to_dict(self) -> dict:
        return {
            "source_label": self.source_label,
            "chapters": [
                {
                    "index": ch.index,
                    "title": ch.title,
                    "raw_text": ch.raw_text,
                    "sentences": [s.text for s in ch.sentences],
                }
                for ch in self.chapters
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Corpus":
        chapters = []
        for ch in data["chapters"]:
            idx = int(ch["index"])
            sents = tuple(Sentence(t, idx, i) for i, t in enumerate(ch["sentences"]))
            chapters.append(Chapter(idx, ch["title"], ch["raw_text"], sents))
        return cls(tuple(chapters), data.get("source_label", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Corpus":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class CorpusStats:
    chapter_count: int
    sentence_count: int
    byte_size: int
    per_chapter: tuple[int, ...] = field(default=(), compare=False)


def split_sentences(text: str) -> list[str]:
    """Split prose on 。！？, keeping each terminator on its sentence.

    Line breaks are layout, not boundaries, so they are removed first. A final
    fragment without a terminator is a sentence of its own; fragments that are
    only whitespace are dropped.
    """
    text = text.translate(_NEWLINES)
    out = []
    start = 0
    for i, ch in enumerate(text):
        if ch in TERMINATORS:
            out.append(text[start:i + 1])
            start = i + 1
    tail = text[start:]
    if tail.strip():
        out.append(tail)
    return out


def _strip_headers(text: str, title: str, header_pattern: str | None) -> str:
    header_re = re.compile(header_pattern) if header_pattern else None
    kept = []
    for line in text.splitlines(keepends=True):
        body = line.strip()
        if title and body == title.strip() and len(body) < TITLE_LINE_MAX:
            continue
        if header_re is not None and header_re.search(line.rstrip("\r\n")):
            continue
        kept.append(line)
    return "".join(kept)


def _read_text(path: Path) -> str:
    try:
        return path.read_bytes().decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"{path}: not valid UTF-8 ({exc.reason} at byte {exc.start})") from None


def make_chapter(index: int, title: str, text: str, header_pattern: str | None = None) -> Chapter:
    raw = _strip_headers(text, title, header_pattern)
    sents = tuple(Sentence(t, index, i) for i, t in enumerate(split_sentences(raw)))
    return Chapter(index, title, raw, sents)


def _per_file_sources(root: Path):
    found = {}
    for path in sorted(root.glob("*.txt")):
        m = _PREFIX_RE.match(path.stem)
        if m is None:
            logger.warning("skipping %s: no numeric prefix", path.name)
            continue
        num = int(m.group(1))
        if num in found:
            raise DuplicateChapterIndex(
                f"{path.name} and {found[num][0].name} share chapter prefix {num}"
            )
        found[num] = (path, m.group(2).strip(" _-.") or path.stem)
    return [(path, title, _read_text(path)) for _, (path, title) in sorted(found.items())]


def _manifest_sources(root: Path, manifest: Path):
    if manifest.suffix == ".toml":
        try:
            import tomllib
        except ModuleNotFoundError:  # python < 3.11
            import tomli as tomllib
        data = tomllib.loads(_read_text(manifest))
    else:
        data = json.loads(_read_text(manifest))
    entries = data.get("chapters", [])
    seen = set()
    for e in entries:
        if int(e["index"]) in seen:
            raise DuplicateChapterIndex(f"manifest lists chapter {e['index']} twice")
        seen.add(int(e["index"]))
    entries = sorted(entries, key=lambda e: int(e["index"]))
    if [int(e["index"]) for e in entries] != list(range(1, len(entries) + 1)):
        raise DuplicateChapterIndex("manifest chapter indices must be contiguous from 1")
    return [
        (root / e["file"], e.get("title", Path(e["file"]).stem), _read_text(root / e["file"]))
        for e in entries
    ]


def _single_file_sources(path: Path, delimiter_pattern: str):
    delim = re.compile(delimiter_pattern)
    sources = []
    preamble = []
    for line in _read_text(path).splitlines(keepends=True):
        m = delim.match(line.rstrip("\r\n"))
        if m:
            groups = m.groupdict()
            if groups.get("title") is not None:
                title = groups["title"]
            elif m.re.groups:
                title = m.group(1) or ""
            else:
                title = m.group(0)
            sources.append([path, title.strip(), []])
        elif sources:
            sources[-1][2].append(line)
        else:
            preamble.append(line)
    if "".join(preamble).strip():
        logger.warning("%s: dropping text before the first chapter delimiter", path.name)
    return [(p, t, "".join(lines)) for p, t, lines in sources]


def load_corpus(root, layout: str = "per-file", delimiter_pattern: str | None = None,
                header_pattern: str | None = None, source_label: str | None = None,
                manifest: str | None = None) -> Corpus:
    """Load a chaptered corpus from ``root`` (a directory, or a file for single-file layout)."""
    root = Path(root)
    if not root.exists():
        raise FileNotFoundError(root)
    if layout not in LAYOUTS:
        raise ValueError(f"unknown layout {layout!r}; expected one of {LAYOUTS}")

    if layout == "manifest" or (layout == "per-file" and manifest):
        mpath = Path(manifest) if manifest else None
        if mpath is None:
            for name in ("manifest.toml", "manifest.json"):
                if (root / name).exists():
                    mpath = root / name
                    break
            else:
                raise FileNotFoundError(f"no manifest.toml or manifest.json in {root}")
        sources = _manifest_sources(root, mpath)
    elif layout == "single-file":
        if root.is_dir():
            txts = sorted(root.glob("*.txt"))
            if len(txts) != 1:
                raise EmptyCorpus(f"single-file layout expects one .txt in {root}, found {len(txts)}")
            root = txts[0]
        sources = _single_file_sources(root, delimiter_pattern or DEFAULT_DELIMITER)
    else:
        sources = _per_file_sources(root)

    if not sources:
        raise EmptyCorpus(f"no chapters found under {root}")
    chapters = tuple(
        make_chapter(i, title, text, header_pattern)
        for i, (_, title, text) in enumerate(sources, start=1)
    )
    return Corpus(chapters, source_label if source_label is not None else root.name)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    per = tuple(len(ch.sentences) for ch in corpus.chapters)
    return CorpusStats(
        chapter_count=len(corpus.chapters),
        sentence_count=sum(per),
        byte_size=sum(len(ch.raw_text.encode("utf-8")) for ch in corpus.chapters),
        per_chapter=per,
    )
