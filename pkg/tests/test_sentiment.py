import math
import random

import pytest
from hypothesis import given, strategies as st

from corpus_lens.errors import EmptyLexicon, NoScoredSentences
from corpus_lens.sentiment import (Label, PolarityLexicon, SentenceScore, bin_index, chapter_series,
                                   group_by_chapter, histogram, label_for, load_polarity_lexicon,
                                   negativity_fraction, parse_polarity_lines, polarity_fractions,
                                   score_corpus, score_sentence)
from corpus_lens.tokenize import Token


def tok(lemma, pos="形容詞", surface=None):
    return Token(surface or lemma, pos, lemma)


def ss(score, chapter=1):
    return SentenceScore(chapter, 0, 0 if score is None else 1, score, label_for(score))


def test_parse_record():
    lex = parse_polarity_lines(["優れる:すぐれる:動詞:1"])
    assert lex.entries == {("優れる", "動詞"): 1.0}


def test_out_of_range_record_skipped():
    lex = parse_polarity_lines(["優れる:すぐれる:動詞:1", "変:へん:形容詞:2.0", "壊れ:た", "x:y:名詞:abc"])
    assert lex.skipped == 3
    assert len(lex) == 1


def test_empty_lexicon(tmp_path):
    p = tmp_path / "pn.dic"
    p.write_text("", encoding="utf-8")
    with pytest.raises(EmptyLexicon):
        load_polarity_lexicon(p)


def test_load_fixture_lexicon(fixture_dir):
    lex = load_polarity_lexicon(fixture_dir / "polarity.dic")
    assert lex.entries[("美しい", "形容詞")] == 0.9
    assert lex.skipped == 0


LEX = PolarityLexicon(
    {("美しい", "形容詞"): 0.8, ("悲しい", "形容詞"): -0.2, ("心", "名詞"): 0.0},
    {"美しい": 0.8, "悲しい": -0.2, "心": 0.0, "泣い": -0.5},
)


def test_positive_word_gives_positive_sentence():
    s = score_sentence([tok("美しい")], LEX)
    assert s.label is Label.POSITIVE and s.score > 0


def test_unmatched_is_unscored():
    s = score_sentence([tok("何か", "名詞")], LEX)
    assert s.score is None and s.label is Label.UNSCORED and s.matched_count == 0


def test_mean_includes_matched_zeros():
    s = score_sentence([tok("美しい"), tok("悲しい"), tok("心", "名詞")], LEX)
    assert s.matched_count == 3
    assert s.score == pytest.approx(0.2, abs=1e-15)
    assert s.label is Label.POSITIVE


def test_pos_must_agree_then_surface_fallback():
    # lemma hit with wrong POS falls through to the surface map
    s = score_sentence([Token("心", "動詞", "心")], LEX)
    assert s.score == 0.0 and s.label is Label.NEUTRAL
    s = score_sentence([Token("泣い", "動詞", "泣く")], LEX)
    assert s.score == -0.5


def test_bin_count_and_rule():
    h = histogram([ss(-1.0), ss(0.0), ss(0.99)])
    assert len(h.counts) == 2 / 0.025 == 80
    assert [i for i, c in enumerate(h.counts) if c] == [0, 40, 79]


def test_plus_one_clamps_to_last_bin():
    assert bin_index(1.0, 80) == 79
    assert bin_index(-1.0, 80) == 0
    assert bin_index(-0.975, 80) == 1
    assert bin_index(-0.9750000001, 80) == 0


def test_all_unscored_histogram():
    h = histogram([ss(None), ss(None)])
    assert h.counts == (0,) * 80 and h.total == 0


def test_bin_width_validation():
    with pytest.raises(ValueError):
        histogram([], bin_width=0.3)
    assert len(histogram([], bin_width=0.5).counts) == 4


def test_chapter_series_examples():
    r = chapter_series({1: [ss(-0.5)]}).rows[0]
    assert (r.chapter_index, r.mean, r.count) == (1, -0.5, 1)
    rows = chapter_series({1: [ss(-0.4), ss(-0.2)], 2: [ss(0.3)]}).rows
    assert rows[0].chapter_index == 1 and rows[0].count == 2
    assert rows[0].mean == pytest.approx(-0.3, abs=1e-15)
    assert (rows[1].chapter_index, rows[1].mean, rows[1].count) == (2, 0.3, 1)


def test_chapter_series_flags_empty_chapters():
    rows = chapter_series({1: [ss(None)], 2: []}).rows
    assert [(r.mean, r.count, r.flagged) for r in rows] == [(0.0, 0, True), (0.0, 0, True)]


def test_negativity_examples():
    assert negativity_fraction([ss(-0.1), ss(-0.9)]) == 1.0
    assert negativity_fraction([ss(-0.1), ss(0.2), ss(-0.3), ss(0.0)]) == 0.5
    with pytest.raises(NoScoredSentences):
        negativity_fraction([ss(None)])


scores_strategy = st.lists(
    st.one_of(st.none(), st.floats(-1, 1), st.sampled_from([-1.0, 0.0, 1.0])), max_size=60
)


@given(scores_strategy)
def test_histogram_properties(values):
    scores = [ss(v) for v in values]
    h = histogram(scores)
    assert h.total == sum(v is not None for v in values)
    shuffled = scores[:]
    random.Random(len(values)).shuffle(shuffled)
    assert histogram(shuffled) == h


@given(scores_strategy)
def test_fraction_identity(values):
    scored = [v for v in values if v is not None]
    if not scored:
        return
    f = polarity_fractions([ss(v) for v in values])
    assert abs(f["negative"] + f["positive"] + f["neutral"] - 1) <= 1e-12


@given(st.lists(st.floats(-1, 1), min_size=1, max_size=12))
def test_sentence_score_in_range(values):
    toks = [Token(f"w{i}", "名詞", f"w{i}") for i in range(len(values))]
    lex = PolarityLexicon({(t.lemma, "名詞"): v for t, v in zip(toks, values)}, {})
    s = score_sentence(toks, lex)
    assert -1 <= s.score <= 1
    assert s.label is label_for(s.score)


def test_series_recomputes_from_raw_scores(fixture_tokens, fixture_dir):
    lex = load_polarity_lexicon(fixture_dir / "polarity.dic")
    scores = score_corpus(fixture_tokens, lex)
    series = chapter_series(group_by_chapter(scores))
    for row in series.rows:
        vals = [s.score for s in scores if s.chapter_index == row.chapter_index and s.score is not None]
        assert row.mean == math.fsum(vals) / len(vals)
    reordered = chapter_series(group_by_chapter(list(reversed(scores))))
    assert [r.count for r in reordered.rows] == [r.count for r in series.rows]
    for a, b in zip(reordered.rows, series.rows):
        assert a.mean == pytest.approx(b.mean, abs=1e-15)
