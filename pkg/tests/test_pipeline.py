import csv
import io
import json
import re
import shutil
import xml.etree.ElementTree as ET

import pytest

from corpus_lens.errors import ConfigError, StageError
from corpus_lens.pipeline import RunConfig, run_pipeline

SVG = "{http://www.w3.org/2000/svg}"

EXPECTED = {
    "corpus.json", "tokens.json", "freq.csv", "keywords.csv", "hist.csv", "hist.svg",
    "series.csv", "series.svg", "sentiment_summary.json", "graph.dot", "coords.csv",
    "mds_diagnostics.json", "coords.svg",
}


@pytest.fixture
def config(fixture_dir, tmp_path):
    return RunConfig.from_toml(fixture_dir / "run.toml").override(out_dir=tmp_path / "out")


def read_csv(path):
    return list(csv.DictReader(io.StringIO(path.read_text(encoding="utf-8"))))


def test_config_paths_resolve_against_file(fixture_dir):
    cfg = RunConfig.from_toml(fixture_dir / "run.toml")
    assert cfg.corpus_root == fixture_dir / "chapters"
    assert cfg.freq_top == 10 and cfg.min_node_freq == 2


def test_unknown_config_key(tmp_path):
    p = tmp_path / "c.toml"
    p.write_text("[stats]\nfreq_topp = 3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.from_toml(p)


def test_missing_lexicon_fails_before_any_stage(config, tmp_path):
    cfg = config.override(polarity_lexicon=tmp_path / "nope.dic")
    with pytest.raises(ConfigError):
        run_pipeline(cfg)
    assert not (tmp_path / "out").exists()


def test_invalid_values_reported_together(config):
    cfg = config.override(freq_top=0, mds_metric="l1")
    with pytest.raises(ConfigError) as info:
        cfg.validate()
    assert "freq_top" in str(info.value) and "mds_metric" in str(info.value)


def test_manifest_lists_artifacts(config):
    manifest = run_pipeline(config)
    names = {a["path"] for a in manifest["artifacts"]}
    assert EXPECTED <= names
    assert {"freq_noun.svg", "freq_verb.svg", "freq_adj.svg"} <= names
    assert manifest["stages"] == ["ingest", "tokenize", "freq", "tfidf", "sentiment", "network", "mds"]
    on_disk = json.loads((config.out_dir / "manifest.json").read_text(encoding="utf-8"))
    assert on_disk == manifest
    assert set(on_disk) == {"tool", "version", "stages", "artifacts"}
    assert all(set(a) == {"path", "bytes", "sha256"} for a in on_disk["artifacts"])


def test_rerun_is_byte_identical(config, tmp_path):
    first = run_pipeline(config)
    second = run_pipeline(config.override(out_dir=tmp_path / "again"))
    assert first == second
    for a in first["artifacts"]:
        assert (config.out_dir / a["path"]).read_bytes() == (tmp_path / "again" / a["path"]).read_bytes()


def test_freq_chart_matches_csv(config):
    run_pipeline(config)
    rows = [r for r in read_csv(config.out_dir / "freq.csv") if r["pos"] == "名詞"]
    assert rows[0]["lemma"] == "源氏" and rows[0]["value"] == "16"
    assert len(rows) == 10
    root = ET.fromstring((config.out_dir / "freq_noun.svg").read_text(encoding="utf-8"))
    titles = [r.find(f"{SVG}title").text for r in root.iter(f"{SVG}rect")]
    assert titles == [f"{r['lemma']}: {r['value']}" for r in rows]


def test_series_chart_matches_csv(config):
    run_pipeline(config)
    rows = read_csv(config.out_dir / "series.csv")
    assert [int(r["chapter"]) for r in rows] == [1, 2, 3]
    root = ET.fromstring((config.out_dir / "series.svg").read_text(encoding="utf-8"))
    pts = root.find(f".//{SVG}polyline[@class='data']").get("points").split()
    assert len(pts) == len(rows)
    ys = [float(p.split(",")[1]) for p in pts]
    means = [float(r["mean"]) for r in rows]
    # pixel order must mirror value order (svg y grows downward)
    assert sorted(range(3), key=lambda i: ys[i]) == sorted(range(3), key=lambda i: -means[i])


def test_hist_csv_and_chart(config):
    run_pipeline(config)
    rows = read_csv(config.out_dir / "hist.csv")
    assert len(rows) == 80
    summary = json.loads((config.out_dir / "sentiment_summary.json").read_text(encoding="utf-8"))
    assert sum(int(r["count"]) for r in rows) == summary["scored_sentences"]
    svg = (config.out_dir / "hist.svg").read_text(encoding="utf-8")
    assert svg.count('<rect class="data"') == 80


def test_coords_and_graph(config):
    run_pipeline(config)
    rows = read_csv(config.out_dir / "coords.csv")
    assert [r["label"] for r in rows] == ["1", "2", "3"]
    dot = (config.out_dir / "graph.dot").read_text(encoding="utf-8")
    for w in re.findall(r"weight=(\d+)", dot):
        assert int(w) >= 2


def test_stage_failure_is_wrapped(config, tmp_path):
    bad = tmp_path / "bad.dic"
    bad.write_text("not a record\n", encoding="utf-8")
    with pytest.raises(StageError) as info:
        run_pipeline(config.override(polarity_lexicon=bad))
    assert info.value.stage == "sentiment"


def test_import_tokenizer(config, fixture_tokens, tmp_path):
    lines = []
    for ch in fixture_tokens.corpus.chapters:
        lines.append(f"#CHAPTER {ch.index}")
        for sent in fixture_tokens.by_chapter()[ch.index]:
            for t in sent:
                lines.append(f"{t.surface}\t{t.pos},*,*,*,*,*,{t.lemma}")
            lines.append("EOS")
    stream = tmp_path / "tokens.mecab"
    stream.write_text("\n".join(lines) + "\n", encoding="utf-8")
    a = run_pipeline(config)
    b = run_pipeline(config.override(tokenizer="import", token_import=stream, out_dir=tmp_path / "imp"))
    assert a == b


def test_single_file_layout(config, fixture_dir, tmp_path):
    parts = []
    for p in sorted((fixture_dir / "chapters").glob("*.txt")):
        parts.append("## " + p.stem.split("_", 1)[1] + "\n" + p.read_text(encoding="utf-8"))
    src = tmp_path / "all.txt"
    src.write_text("".join(parts), encoding="utf-8")
    manifest = run_pipeline(config.override(corpus_root=src, layout="single-file", out_dir=tmp_path / "sf"))
    assert "coords.csv" in {a["path"] for a in manifest["artifacts"]}


def test_out_dir_env(config, tmp_path, monkeypatch):
    monkeypatch.setenv("CORPUS_LENS_OUT", str(tmp_path / "env_out"))
    cfg = RunConfig.from_toml(config.corpus_root.parent / "run.toml")
    run_pipeline(cfg)
    assert (tmp_path / "env_out" / "manifest.json").exists()
    shutil.rmtree(tmp_path / "env_out")
