"""End-to-end run: ingest -> tokenize -> freq / tfidf / sentiment / network / mds -> charts."""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import __version__, charts, mds, network, sentiment, stats
from .corpus import LAYOUTS, Corpus, corpus_stats, load_corpus
from .errors import ConfigError, CorpusLensError, StageError
from .tokenize import (CONTENT_POS, POS_TAGS, SegmentationLexicon, TokenizedCorpus,
                       import_tokens, tokenize_corpus)

logger = logging.getLogger(__name__)

OUT_ENV = "CORPUS_LENS_OUT"
DEFAULT_OUT = "corpus-lens-out"
POS_SLUGS = {"名詞": "noun", "動詞": "verb", "形容詞": "adj", "副詞": "adv"}
_PATH_FIELDS = ("corpus_root", "segmentation_lexicon", "token_import", "polarity_lexicon",
                "manifest", "out_dir")


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV) or DEFAULT_OUT)


@dataclass
class RunConfig:
    corpus_root: Path | None = None
    layout: str = "per-file"
    delimiter_pattern: str | None = None
    header_pattern: str | None = None
    manifest: Path | None = None
    source_label: str | None = None

    tokenizer: str = "lexicon"
    segmentation_lexicon: Path | None = None
    token_import: Path | None = None

    freq_pos: list[str] = field(default_factory=lambda: ["名詞", "動詞", "形容詞"])
    freq_top: int = 30
    tfidf_pos: list[str] = field(default_factory=lambda: sorted(CONTENT_POS))
    keywords_k: int = 10

    polarity_lexicon: Path | None = None
    bin_width: float = sentiment.BIN_WIDTH

    network_pos: list[str] = field(default_factory=lambda: sorted(CONTENT_POS))
    min_node_freq: int = 5
    min_edge_weight: int = 2
    top_k_nodes: int | None = None
    graph_format: str = "dot"

    mds_metric: str = "cosine"
    mds_weighting: str | None = None
    mds_refine: str = "smacof"
    smacof_max_iter: int = 500
    smacof_eps: float = 1e-9

    out_dir: Path | None = None

    @classmethod
    def from_mapping(cls, data: dict, base: Path | None = None) -> "RunConfig":
        """Build from a (possibly sectioned) mapping; relative paths resolve against ``base``."""
        flat: dict[str, Any] = {}
        for k, v in data.items():
            if isinstance(v, dict):
                flat.update(v)
            else:
                flat[k] = v
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(flat) - names)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        for k in _PATH_FIELDS:
            if flat.get(k) is not None:
                p = Path(flat[k])
                flat[k] = p if p.is_absolute() or base is None else base / p
        return cls(**flat)

    @classmethod
    def from_toml(cls, path) -> "RunConfig":
        try:
            import tomllib
        except ModuleNotFoundError:  # python < 3.11
            import tomli as tomllib
        path = Path(path)
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        return cls.from_mapping(data, base=path.parent)

    def override(self, **values) -> "RunConfig":
        """Return a copy with every non-None value replaced (CLI flags win)."""
        changes = {k: v for k, v in values.items() if v is not None}
        for k in _PATH_FIELDS:
            if k in changes:
                changes[k] = Path(changes[k])
        return dataclasses.replace(self, **changes)

    def resolved_out_dir(self) -> Path:
        return Path(self.out_dir) if self.out_dir is not None else default_out_dir()

    def validate(self) -> "RunConfig":
        problems = []

        def need(path, what):
            if path is None:
                problems.append(f"{what} is not set")
            elif not Path(path).exists():
                problems.append(f"{what} does not exist: {path}")

        need(self.corpus_root, "corpus_root")
        if self.layout not in LAYOUTS:
            problems.append(f"layout must be one of {LAYOUTS}")
        if self.tokenizer == "lexicon":
            need(self.segmentation_lexicon, "segmentation_lexicon")
        elif self.tokenizer == "import":
            need(self.token_import, "token_import")
        else:
            problems.append("tokenizer must be 'lexicon' or 'import'")
        if self.manifest is not None:
            need(self.manifest, "manifest")
        need(self.polarity_lexicon, "polarity_lexicon")
        for name in ("freq_pos", "tfidf_pos", "network_pos"):
            tags = getattr(self, name)
            if not isinstance(tags, list) or not tags:
                problems.append(f"{name} must be a non-empty list of POS tags")
            elif tags != ["all"] and not set(tags) <= POS_TAGS:
                problems.append(f"{name} has unknown POS tags {sorted(set(tags) - POS_TAGS)}")
        for name in ("freq_top", "keywords_k", "min_node_freq", "min_edge_weight", "smacof_max_iter"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                problems.append(f"{name} must be an integer >= 1")
        if self.top_k_nodes is not None and (not isinstance(self.top_k_nodes, int) or self.top_k_nodes < 0):
            problems.append("top_k_nodes must be a non-negative integer")
        try:
            sentiment.n_bins_for(float(self.bin_width))
        except (TypeError, ValueError) as exc:
            problems.append(str(exc))
        if self.graph_format not in network.FORMATS:
            problems.append(f"graph_format must be one of {network.FORMATS}")
        if self.mds_metric not in mds.METRICS:
            problems.append(f"mds_metric must be one of {mds.METRICS}")
        if self.mds_weighting is not None and self.mds_weighting not in mds.WEIGHTINGS:
            problems.append(f"mds_weighting must be one of {mds.WEIGHTINGS}")
        if self.mds_refine not in ("smacof", "none"):
            problems.append("mds_refine must be 'smacof' or 'none'")
        if not self.smacof_eps > 0:
            problems.append("smacof_eps must be > 0")
        if problems:
            raise ConfigError("; ".join(problems))
        return self


def pos_set(tags: list[str]):
    return None if tags == ["all"] else frozenset(tags)


def pos_slug(pos: str, i: int) -> str:
    return POS_SLUGS.get(pos, f"pos{i}")


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def fmt_float(v: float) -> str:
    return repr(float(v))


def json_text(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=1) + "\n"


class _Writer:
    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.artifacts: list[dict] = []

    def write(self, name: str, text: str):
        data = text.encode("utf-8")
        (self.out_dir / name).write_bytes(data)
        self.artifacts.append({
            "path": name,
            "bytes": len(data),
            "sha256": hashlib.sha256(data).hexdigest(),
        })


# table builders shared with the CLI so chart data and CSV data cannot drift

def freq_rows(table: stats.FrequencyTable):
    return [(rank, lemma, count) for rank, (lemma, count) in enumerate(table.rows, start=1)]


def keyword_rows(lists):
    return [
        (kl.chapter_index, rank, lemma, fmt_float(score))
        for kl in lists
        for rank, (lemma, score) in enumerate(kl.rows, start=1)
    ]


def hist_rows(hist: sentiment.SentimentHistogram):
    edges = hist.edges
    return [
        (i, fmt_float(edges[i]), fmt_float(edges[i + 1]), c) for i, c in enumerate(hist.counts)
    ]


def series_rows(series: sentiment.ChapterSeries, titles: dict[int, str]):
    return [
        (r.chapter_index, titles.get(r.chapter_index, ""), fmt_float(r.mean), r.count, int(r.flagged))
        for r in series.rows
    ]


def coord_rows(emb: mds.Embedding2D):
    return [(lab, fmt_float(x), fmt_float(y)) for lab, (x, y) in zip(emb.labels, emb.coords.tolist())]


def sentiment_summary(scores, tokenized, lexicon) -> dict:
    scored = [s for s in scores if s.score is not None]
    summary = {
        "sentences": len(scores),
        "scored_sentences": len(scored),
        "lexicon_entries": len(lexicon),
        "lexicon_skipped_records": lexicon.skipped,
        "word_polarity_counts": sentiment.word_polarity_counts(tokenized, lexicon),
    }
    if scored:
        summary["fractions"] = sentiment.polarity_fractions(scored)
        summary["negativity_fraction"] = summary["fractions"]["negative"]
    return summary


def embed(matrix: stats.TermDocMatrix, metric="cosine", weighting=None, refine="smacof",
          max_iter=500, eps=1e-9) -> mds.Embedding2D:
    D = mds.chapter_dissimilarity(matrix, metric, weighting)
    emb = mds.classical_mds(D)
    if refine == "smacof":
        emb = mds.smacof(D, emb, max_iter=max_iter, eps=eps)
    return emb


def run_pipeline(config: RunConfig) -> dict:
    """Run every stage and return the manifest (also written as manifest.json)."""
    config.validate()
    out_dir = config.resolved_out_dir()
    out_dir.mkdir(parents=True, exist_ok=True)
    w = _Writer(out_dir)
    stages: list[str] = []

    def stage(name):
        stages.append(name)
        logger.info("stage %s", name)
        return name

    current = None
    try:
        current = stage("ingest")
        corpus: Corpus = load_corpus(
            config.corpus_root, config.layout, config.delimiter_pattern,
            config.header_pattern, config.source_label,
            str(config.manifest) if config.manifest else None,
        )
        w.write("corpus.json", corpus.to_json())
        cs = corpus_stats(corpus)
        titles = {ch.index: ch.title for ch in corpus.chapters}

        current = stage("tokenize")
        if config.tokenizer == "lexicon":
            tokens = tokenize_corpus(corpus, SegmentationLexicon.load(config.segmentation_lexicon))
        else:
            with open(config.token_import, encoding="utf-8-sig") as fh:
                tokens = import_tokens(fh, corpus)
        w.write("tokens.json", tokens.to_json())

        current = stage("freq")
        all_rows = []
        for i, pos in enumerate(config.freq_pos):
            table = stats.pos_frequency(tokens, pos, config.freq_top)
            rows = freq_rows(table)
            all_rows += [(pos, *r) for r in rows]
            if rows:
                spec = charts.ChartSpec(
                    "bar", f"{pos} frequency (top {config.freq_top})",
                    y=[r[2] for r in rows], labels=[r[1] for r in rows],
                    x_label="lemma", y_label="count",
                )
                w.write(f"freq_{pos_slug(pos, i)}.svg", charts.render_chart(spec))
        w.write("freq.csv", csv_text(("pos", "rank", "lemma", "value"), all_rows))

        current = stage("tfidf")
        matrix = stats.TermDocMatrix.from_tokens(tokens, pos_set(config.tfidf_pos))
        keywords = stats.chapter_keywords(matrix, config.keywords_k)
        w.write("keywords.csv", csv_text(("chapter", "rank", "lemma", "value"), keyword_rows(keywords)))

        current = stage("sentiment")
        lexicon = sentiment.load_polarity_lexicon(config.polarity_lexicon)
        scores = sentiment.score_corpus(tokens, lexicon)
        hist = sentiment.histogram(scores, float(config.bin_width))
        series = sentiment.chapter_series(
            sentiment.group_by_chapter(scores, [ch.index for ch in corpus.chapters])
        )
        hrows = hist_rows(hist)
        w.write("hist.csv", csv_text(("bin", "lo", "hi", "count"), hrows))
        w.write("hist.svg", charts.render_chart(charts.ChartSpec(
            "histogram", "Sentence polarity distribution",
            y=[r[3] for r in hrows], x=[float(r[1]) for r in hrows] + [float(hrows[-1][2])],
            x_label="polarity score", y_label="sentences",
        )))
        srows = series_rows(series, titles)
        w.write("series.csv", csv_text(("chapter", "title", "mean", "count", "flagged"), srows))
        w.write("series.svg", charts.render_chart(charts.ChartSpec(
            "line", "Mean sentence polarity by chapter",
            x=[r[0] for r in srows], y=[float(r[2]) for r in srows],
            x_label="chapter", y_label="mean polarity",
        )))
        summary = sentiment_summary(scores, tokens, lexicon)
        summary["corpus"] = {"chapters": cs.chapter_count, "sentences": cs.sentence_count,
                             "bytes": cs.byte_size}
        w.write("sentiment_summary.json", json_text(summary))

        current = stage("network")
        graph = network.build_cooccurrence(tokens, pos_set(config.network_pos), config.min_node_freq)
        graph = network.prune(graph, config.min_edge_weight, config.top_k_nodes)
        ext = {"dot": "dot", "graphml": "graphml", "json": "json"}[config.graph_format]
        w.write(f"graph.{ext}", network.export_graph(graph, config.graph_format))

        current = stage("mds")
        emb = embed(matrix, config.mds_metric, config.mds_weighting, config.mds_refine,
                    config.smacof_max_iter, config.smacof_eps)
        crows = coord_rows(emb)
        w.write("coords.csv", csv_text(("label", "x", "y"), crows))
        w.write("mds_diagnostics.json", json_text(emb.diagnostics()))
        w.write("coords.svg", charts.render_chart(charts.ChartSpec(
            "scatter", "Chapter MDS embedding",
            x=[float(r[1]) for r in crows], y=[float(r[2]) for r in crows],
            labels=[str(r[0]) for r in crows], x_label="dimension 1", y_label="dimension 2",
        )))
    except (CorpusLensError, OSError, ValueError) as exc:
        raise StageError(current, exc) from exc

    manifest = {
        "tool": "corpus-lens",
        "version": __version__,
        "stages": stages,
        "artifacts": w.artifacts,
    }
    (out_dir / "manifest.json").write_text(json_text(manifest), encoding="utf-8")
    return manifest


def load_tokens(path) -> TokenizedCorpus:
    return TokenizedCorpus.from_json(Path(path).read_text(encoding="utf-8"))
