import math

import pytest
from hypothesis import given, strategies as st

from osstox.errors import ParseError
from osstox.sentiment import (
    SentimentRules,
    ValenceLexicon,
    compound,
    load_valence_lexicon,
)
from osstox.textprep import tokenize


def make_lexicon(valences=None, boosters=None, negations=()):
    return ValenceLexicon(
        valences=valences or {},
        boosters=boosters or {},
        negations=frozenset(negations),
    )


BASIC = make_lexicon(
    valences={"good": 1.9, "bad": -2.5, "awful": -2.9, "fine": 0.8},
    boosters={"very": 0.293, "slightly": -0.293},
    negations=("not", "never"),
)


def test_empty_text_scores_zero():
    assert compound(tokenize(""), BASIC) == 0.0


def test_no_hits_scores_zero():
    assert compound(tokenize("the cat sat !!!"), BASIC) == 0.0


def test_single_word_normalization():
    # oracle: 1.9 / sqrt(1.9^2 + 15)
    expected = 1.9 / math.sqrt(1.9 * 1.9 + 15.0)
    assert compound(tokenize("good"), BASIC) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.4404, abs=5e-5)


def test_negation_flips_and_scales():
    rules = SentimentRules(use_exclamation=False)
    plain = compound(tokenize("good"), BASIC, rules)
    negated = compound(tokenize("not good"), BASIC, rules)
    s = 1.9 * -0.74
    assert negated == pytest.approx(s / math.sqrt(s * s + 15.0), abs=1e-12)
    assert negated < 0 < plain


def test_negation_window_is_three_words():
    rules = SentimentRules(use_exclamation=False)
    inside = compound(tokenize("not really that good"), BASIC, rules)
    outside = compound(tokenize("not really that very good"), BASIC, rules)
    assert inside < 0
    assert outside > 0  # negation four words back is out of the window


def test_booster_amplifies_with_decay():
    adjacent = compound(tokenize("very good"), BASIC)
    gap_one = compound(tokenize("very so-called good"), BASIC)
    plain = compound(tokenize("good"), BASIC)
    assert adjacent > gap_one > plain
    s = 1.9 + 0.293
    assert adjacent == pytest.approx(s / math.sqrt(s * s + 15.0), abs=1e-12)


def test_dampener_reduces_magnitude():
    damped = compound(tokenize("slightly good"), BASIC)
    plain = compound(tokenize("good"), BASIC)
    assert 0 < damped < plain


def test_booster_pushes_negative_further_down():
    assert compound(tokenize("very bad"), BASIC) < compound(tokenize("bad"), BASIC)


def test_allcaps_emphasis():
    caps = compound(tokenize("GOOD"), BASIC)
    plain = compound(tokenize("good"), BASIC)
    s = 1.9 + 0.733
    assert caps == pytest.approx(s / math.sqrt(s * s + 15.0), abs=1e-12)
    assert caps > plain
    no_caps_rule = compound(tokenize("GOOD"), BASIC, SentimentRules(use_allcaps=False))
    assert no_caps_rule == plain


def test_exclamation_emphasis_caps_at_three():
    one = compound(tokenize("good !"), BASIC)
    three = compound(tokenize("good !!!"), BASIC)
    four = compound(tokenize("good !!!!"), BASIC)
    plain = compound(tokenize("good"), BASIC)
    assert plain < one < three
    assert three == four
    s = 1.9 + 3 * 0.292
    assert three == pytest.approx(s / math.sqrt(s * s + 15.0), abs=1e-12)


def test_exclamation_ignored_when_no_hits():
    assert compound(tokenize("meh !!!"), BASIC) == 0.0


def test_but_clause_reweighting():
    rules = SentimentRules(use_exclamation=False)
    both = compound(tokenize("good but awful"), BASIC, rules)
    s = 1.9 * 0.5 + (-2.9) * 1.5
    assert both == pytest.approx(s / math.sqrt(s * s + 15.0), abs=1e-12)
    without_rule = compound(
        tokenize("good but awful"), BASIC, SentimentRules(use_exclamation=False, use_but_clause=False)
    )
    assert both < without_rule


def test_gratitude_for_thanks_sentence():
    # direction check against a curated-lexicon sentence
    from osstox.data import default_valence_lexicon

    vl = default_valence_lexicon()
    assert compound(tokenize("Thanks, this looks great!"), vl) > 0.3
    assert compound(tokenize("You are a stupid idiot."), vl) < -0.3


@given(st.lists(st.sampled_from(["good", "bad", "awful", "very", "not", "meh", "fine"]), max_size=12))
def test_odd_symmetry_under_valence_negation(words):
    mirror = make_lexicon(
        valences={w: -v for w, v in BASIC.valences.items()},
        boosters=dict(BASIC.boosters),
        negations=BASIC.negations,
    )
    text = " ".join(words)
    assert compound(tokenize(text), BASIC) == pytest.approx(
        -compound(tokenize(text), mirror), abs=1e-12
    )


@given(st.lists(st.sampled_from(["good", "bad", "very", "not", "meh"]), max_size=10))
def test_appending_zero_valence_word_is_neutral(words):
    text = " ".join(words)
    grown = (text + " meh").strip()
    assert compound(tokenize(text), BASIC) == compound(tokenize(grown), BASIC)


@given(st.lists(st.sampled_from(["good", "bad", "awful", "very", "slightly", "not", "never", "but", "!"]), max_size=20))
def test_output_strictly_inside_unit_interval(words):
    value = compound(tokenize(" ".join(words)), BASIC)
    assert -1.0 < value < 1.0


def test_loader_round_trip(tmp_path):
    tsv = tmp_path / "valence.tsv"
    tsv.write_text("# comment\ngood\t1.9\nbad\t-2.5\n")
    sidecar = tmp_path / "mods.json"
    sidecar.write_text(
        '{"boosters": ["very"], "dampeners": ["slightly"], "negations": ["not"]}'
    )
    vl = load_valence_lexicon(tsv, sidecar)
    assert vl.valences == {"good": 1.9, "bad": -2.5}
    assert vl.boosters == {"very": 0.293, "slightly": -0.293}
    assert vl.negations == frozenset({"not"})


def test_loader_rejects_bad_rows(tmp_path):
    tsv = tmp_path / "valence.tsv"
    tsv.write_text("good\n")
    with pytest.raises(ParseError, match="line 1"):
        load_valence_lexicon(tsv)
    tsv.write_text("good\tnotanumber\n")
    with pytest.raises(ParseError):
        load_valence_lexicon(tsv)
