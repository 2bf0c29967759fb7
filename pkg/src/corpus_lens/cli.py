"""``corpus-lens`` command line.

Exit codes: 0 success, 1 invalid input or configuration, 2 a processing stage failed.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys
import types
import typing
from pathlib import Path

from . import __version__, charts, mds, network, sentiment, stats
from .corpus import LAYOUTS, Corpus, load_corpus
from .errors import (AlignmentError, ConfigError, CorpusLensError, DuplicateChapterIndex, EmptyCorpus,
                     EmptyLexicon, EncodingError, MalformedRecord, StageError)
from .pipeline import (RunConfig, coord_rows, csv_text, default_out_dir, embed, freq_rows, hist_rows,
                       json_text, keyword_rows, load_tokens, pos_set, run_pipeline, sentiment_summary,
                       series_rows)
from .tokenize import CONTENT_POS, SegmentationLexicon, import_tokens, tokenize_corpus

log = logging.getLogger("corpus_lens")

# bad inputs rather than failed computations
INPUT_ERRORS = (ConfigError, FileNotFoundError, EncodingError, EmptyCorpus, DuplicateChapterIndex,
                MalformedRecord, AlignmentError, EmptyLexicon, json.JSONDecodeError)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _out(path: str | None, default_name: str) -> Path:
    p = Path(path) if path else default_out_dir() / default_name
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def _write(path: Path, text: str):
    path.write_bytes(text.encode("utf-8"))
    log.info("wrote %s", path)


def _pos_arg(values):
    if not values:
        return frozenset(CONTENT_POS)
    return pos_set(list(values))


def cmd_ingest(a):
    corpus = load_corpus(a.root, a.layout, a.delimiter_pattern, a.header_pattern,
                         a.source_label, a.manifest)
    _write(_out(a.out, "corpus.json"), corpus.to_json())
    if a.sentences_out:
        lines = [s.text for s in corpus.sentences]
        _write(Path(a.sentences_out), "\n".join(lines) + "\n")


def cmd_tokenize(a):
    corpus = Corpus.from_json(Path(a.corpus).read_text(encoding="utf-8"))
    if a.lexicon:
        tokens = tokenize_corpus(corpus, SegmentationLexicon.load(a.lexicon))
    else:
        with open(a.import_path, encoding="utf-8-sig") as fh:
            tokens = import_tokens(fh, corpus)
    _write(_out(a.out, "tokens.json"), tokens.to_json())


def cmd_freq(a):
    table = stats.pos_frequency(load_tokens(a.tokens), a.pos, a.top)
    rows = freq_rows(table)
    _write(_out(a.out, "freq.csv"), csv_text(("rank", "lemma", "value"), rows))
    if a.svg and rows:
        spec = charts.ChartSpec("bar", f"{a.pos} frequency (top {a.top})", y=[r[2] for r in rows],
                                labels=[r[1] for r in rows], x_label="lemma", y_label="count")
        _write(Path(a.svg), charts.render_chart(spec))


def cmd_tfidf(a):
    matrix = stats.TermDocMatrix.from_tokens(load_tokens(a.tokens), _pos_arg(a.pos))
    rows = keyword_rows(stats.chapter_keywords(matrix, a.k))
    _write(_out(a.out, "keywords.csv"), csv_text(("chapter", "rank", "lemma", "value"), rows))


def cmd_sentiment(a):
    tokens = load_tokens(a.tokens)
    lexicon = sentiment.load_polarity_lexicon(a.lexicon)
    scores = sentiment.score_corpus(tokens, lexicon)
    hist = sentiment.histogram(scores, a.bin_width)
    series = sentiment.chapter_series(
        sentiment.group_by_chapter(scores, [ch.index for ch in tokens.corpus.chapters])
    )
    titles = {ch.index: ch.title for ch in tokens.corpus.chapters}
    _write(_out(a.out_hist, "hist.csv"), csv_text(("bin", "lo", "hi", "count"), hist_rows(hist)))
    _write(_out(a.out_series, "series.csv"),
           csv_text(("chapter", "title", "mean", "count", "flagged"), series_rows(series, titles)))
    _write(_out(a.out_summary, "sentiment_summary.json"),
           json_text(sentiment_summary(scores, tokens, lexicon)))


def cmd_network(a):
    tokens = load_tokens(a.tokens)
    graph = network.build_cooccurrence(tokens, _pos_arg(a.pos), a.min_node_freq)
    graph = network.prune(graph, a.min_edge_weight, a.top_k_nodes)
    _write(_out(a.out, f"graph.{a.format}"), network.export_graph(graph, a.format, a.derived))


def cmd_mds(a):
    tokens = load_tokens(a.tokens)
    matrix = stats.TermDocMatrix.from_tokens(tokens, _pos_arg(a.pos))
    if a.mode == "words":
        D = mds.word_dissimilarity(matrix, a.top_n)
        emb = mds.classical_mds(D)
        if a.refine == "smacof":
            emb = mds.smacof(D, emb)
    else:
        emb = embed(matrix, a.metric, a.weighting, a.refine)
    out = _out(a.out, "coords.csv")
    _write(out, csv_text(("label", "x", "y"), coord_rows(emb)))
    diag = Path(a.diagnostics) if a.diagnostics else out.with_name(out.stem + ".diagnostics.json")
    _write(diag, json_text(emb.diagnostics()))


def _add_config_flags(p: argparse.ArgumentParser):
    """One ``--field-name`` flag per RunConfig field."""
    hints = typing.get_type_hints(RunConfig)
    for f in dataclasses.fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        hint = hints[f.name]
        base = hint
        if typing.get_origin(hint) in (typing.Union, types.UnionType):
            base = next(t for t in typing.get_args(hint) if t is not type(None))
        if typing.get_origin(base) is list or base is list:
            p.add_argument(flag, dest=f.name, nargs="+", default=None, metavar="TAG")
        elif base in (int, float):
            p.add_argument(flag, dest=f.name, type=base, default=None)
        else:
            p.add_argument(flag, dest=f.name, default=None)


def cmd_run(a):
    cfg = RunConfig.from_toml(a.config) if a.config else RunConfig()
    overrides = {f.name: getattr(a, f.name) for f in dataclasses.fields(RunConfig)}
    cfg = cfg.override(**overrides)
    manifest = run_pipeline(cfg)
    log.info("%d artifacts written to %s", len(manifest["artifacts"]), cfg.resolved_out_dir())


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="corpus-lens", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"corpus-lens {__version__}")
    p.add_argument("--quiet", action="store_true", help="only report errors")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", help="load a chaptered corpus into corpus.json")
    s.add_argument("--root", required=True)
    s.add_argument("--layout", choices=LAYOUTS, default="per-file")
    s.add_argument("--delimiter-pattern")
    s.add_argument("--header-pattern")
    s.add_argument("--manifest")
    s.add_argument("--source-label")
    s.add_argument("--sentences-out", help="also write one sentence per line (analyzer input)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("tokenize", help="segment or import tokens into tokens.json")
    s.add_argument("--corpus", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--lexicon")
    g.add_argument("--import", dest="import_path")
    s.add_argument("--out")
    s.set_defaults(func=cmd_tokenize)

    s = sub.add_parser("freq", help="top-N lemma frequencies for one POS")
    s.add_argument("--tokens", required=True)
    s.add_argument("--pos", default="名詞")
    s.add_argument("--top", type=int, default=30)
    s.add_argument("--svg")
    s.add_argument("--out")
    s.set_defaults(func=cmd_freq)

    s = sub.add_parser("tfidf", help="per-chapter TF-IDF keywords")
    s.add_argument("--tokens", required=True)
    s.add_argument("--k", type=int, default=10)
    s.add_argument("--pos", nargs="+", help="POS tags to keep, or 'all' (default: 名詞 動詞 形容詞)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_tfidf)

    s = sub.add_parser("sentiment", help="polarity histogram and chapter series")
    s.add_argument("--tokens", required=True)
    s.add_argument("--lexicon", required=True)
    s.add_argument("--bin-width", type=float, default=sentiment.BIN_WIDTH)
    s.add_argument("--out-hist")
    s.add_argument("--out-series")
    s.add_argument("--out-summary")
    s.set_defaults(func=cmd_sentiment)

    s = sub.add_parser("network", help="word co-occurrence graph")
    s.add_argument("--tokens", required=True)
    s.add_argument("--pos", nargs="+")
    s.add_argument("--min-node-freq", type=int, default=5)
    s.add_argument("--min-edge-weight", type=int, default=2)
    s.add_argument("--top-k-nodes", type=int)
    s.add_argument("--format", choices=network.FORMATS, default="dot")
    s.add_argument("--derived", action="store_true", help="add jaccard and pmi edge attributes")
    s.add_argument("--out")
    s.set_defaults(func=cmd_network)

    s = sub.add_parser("mds", help="2-D embedding of chapters (or top words)")
    s.add_argument("--tokens", required=True)
    s.add_argument("--metric", choices=mds.METRICS, default="cosine")
    s.add_argument("--weighting", choices=mds.WEIGHTINGS)
    s.add_argument("--refine", choices=("smacof", "none"), default="smacof")
    s.add_argument("--mode", choices=("chapters", "words"), default="chapters")
    s.add_argument("--top-n", type=int, default=50)
    s.add_argument("--pos", nargs="+")
    s.add_argument("--diagnostics")
    s.add_argument("--out")
    s.set_defaults(func=cmd_mds)

    s = sub.add_parser("run", help="full pipeline from a TOML config")
    s.add_argument("--config")
    _add_config_flags(s)
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except StageError as exc:
        log.error("%s", exc)
        return 2
    except INPUT_ERRORS as exc:
        log.error("%s", exc)
        return 1
    except (CorpusLensError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
