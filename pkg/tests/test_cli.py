import json

import pytest

from corpus_lens import __version__
from corpus_lens.cli import main


@pytest.fixture
def workdir(tmp_path, fixture_dir):
    corpus = tmp_path / "corpus.json"
    tokens = tmp_path / "tokens.json"
    assert main(["--quiet", "ingest", "--root", str(fixture_dir / "chapters"), "--out", str(corpus)]) == 0
    assert main(["--quiet", "tokenize", "--corpus", str(corpus),
                 "--lexicon", str(fixture_dir / "segmentation.tsv"), "--out", str(tokens)]) == 0
    return tmp_path


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_usage_error_exits_1():
    with pytest.raises(SystemExit) as info:
        main(["freq"])
    assert info.value.code == 1


def test_ingest_sentences_out(tmp_path, fixture_dir):
    sents = tmp_path / "s.txt"
    rc = main(["--quiet", "ingest", "--root", str(fixture_dir / "chapters"),
               "--out", str(tmp_path / "c.json"), "--sentences-out", str(sents)])
    assert rc == 0
    assert len(sents.read_text(encoding="utf-8").splitlines()) == 30


def test_subcommands_end_to_end(workdir, fixture_dir):
    t = str(workdir / "tokens.json")
    assert main(["--quiet", "freq", "--tokens", t, "--pos", "名詞", "--top", "5",
                 "--out", str(workdir / "f.csv"), "--svg", str(workdir / "f.svg")]) == 0
    lines = (workdir / "f.csv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "rank,lemma,value" and lines[1] == "1,源氏,16"
    assert (workdir / "f.svg").read_text(encoding="utf-8").count("<rect") == 5

    assert main(["--quiet", "tfidf", "--tokens", t, "--k", "3", "--out", str(workdir / "k.csv")]) == 0
    assert (workdir / "k.csv").read_text(encoding="utf-8").startswith("chapter,rank,lemma,value\n1,1,")

    assert main(["--quiet", "sentiment", "--tokens", t, "--lexicon", str(fixture_dir / "polarity.dic"),
                 "--out-hist", str(workdir / "h.csv"), "--out-series", str(workdir / "s.csv"),
                 "--out-summary", str(workdir / "sum.json")]) == 0
    assert len((workdir / "h.csv").read_text(encoding="utf-8").splitlines()) == 81
    assert json.loads((workdir / "sum.json").read_text(encoding="utf-8"))["sentences"] == 30

    assert main(["--quiet", "network", "--tokens", t, "--min-node-freq", "2", "--format", "json",
                 "--derived", "--out", str(workdir / "g.json")]) == 0
    g = json.loads((workdir / "g.json").read_text(encoding="utf-8"))
    assert all("jaccard" in e for e in g["edges"])

    assert main(["--quiet", "mds", "--tokens", t, "--out", str(workdir / "c.csv")]) == 0
    assert len((workdir / "c.csv").read_text(encoding="utf-8").splitlines()) == 4
    assert json.loads((workdir / "c.diagnostics.json").read_text(encoding="utf-8"))["stop_reason"]

    assert main(["--quiet", "mds", "--tokens", t, "--mode", "words", "--top-n", "6",
                 "--out", str(workdir / "w.csv")]) == 0
    assert len((workdir / "w.csv").read_text(encoding="utf-8").splitlines()) == 7


def test_tokenize_import_mode(workdir):
    stream = workdir / "one.mecab"
    corpus = workdir / "tiny.json"
    root = workdir / "tiny"
    root.mkdir()
    (root / "01_a.txt").write_text("源氏は思った。\n", encoding="utf-8")
    assert main(["--quiet", "ingest", "--root", str(root), "--out", str(corpus)]) == 0
    stream.write_text(
        "源氏\t名詞,固有名詞,人名,一般,*,*,源氏,ゲンジ,ゲンジ\n"
        "は\t助詞,係助詞,*,*,*,*,は,ハ,ワ\n"
        "思っ\t動詞,自立,*,*,五段・ワ行促音便,連用タ接続,思う,オモッ,オモッ\n"
        "た\t助動詞,*,*,*,特殊・タ,基本形,た,タ,タ\n"
        "。\t記号,句点,*,*,*,*,。,。,。\nEOS\n", encoding="utf-8")
    out = workdir / "tiny_tokens.json"
    assert main(["--quiet", "tokenize", "--corpus", str(corpus), "--import", str(stream), "--out", str(out)]) == 0
    toks = json.loads(out.read_text(encoding="utf-8"))["tokens"]
    assert [t[2] for t in toks[0]] == ["源氏", "は", "思う", "た", "。"]


def test_alignment_error_exits_1(workdir):
    bad = workdir / "bad.mecab"
    bad.write_text("EOS\n", encoding="utf-8")
    rc = main(["--quiet", "tokenize", "--corpus", str(workdir / "corpus.json"), "--import", str(bad)])
    assert rc == 1


def test_run_with_overrides(fixture_dir, tmp_path):
    out = tmp_path / "run"
    rc = main(["--quiet", "run", "--config", str(fixture_dir / "run.toml"), "--out-dir", str(out),
               "--freq-top", "3", "--graph-format", "graphml", "--freq-pos", "名詞"])
    assert rc == 0
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    names = {a["path"] for a in manifest["artifacts"]}
    assert "graph.graphml" in names and "freq_verb.svg" not in names
    assert len((out / "freq.csv").read_text(encoding="utf-8").splitlines()) == 4


def test_run_missing_lexicon_exits_1(fixture_dir, tmp_path):
    rc = main(["--quiet", "run", "--config", str(fixture_dir / "run.toml"), "--out-dir", str(tmp_path / "o"),
               "--polarity-lexicon", str(tmp_path / "missing.dic")])
    assert rc == 1
    assert not (tmp_path / "o").exists()


def test_run_stage_failure_exits_2(fixture_dir, tmp_path):
    bad = tmp_path / "bad.dic"
    bad.write_text("garbage\n", encoding="utf-8")
    rc = main(["--quiet", "run", "--config", str(fixture_dir / "run.toml"), "--out-dir", str(tmp_path / "o"),
               "--polarity-lexicon", str(bad)])
    assert rc == 2


def test_env_out_dir(fixture_dir, tmp_path, monkeypatch):
    monkeypatch.setenv("CORPUS_LENS_OUT", str(tmp_path / "envout"))
    assert main(["--quiet", "ingest", "--root", str(fixture_dir / "chapters")]) == 0
    assert (tmp_path / "envout" / "corpus.json").exists()
