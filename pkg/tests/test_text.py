import pytest

from vizref.text import Token, ingest_utterance, pos_tag, tokenize


def test_tokenize_keeps_contractions_and_splits_punctuation():
    assert tokenize("Ok let's look, now!") == ["Ok", "let's", "look", ",", "now", "!"]


def test_pos_tags_for_worked_example():
    tokens = pos_tag(tokenize("can you have this graph for months of the year"))
    by_word = {t.surface: t.pos for t in tokens}
    assert by_word["this"] == "DET"
    assert by_word["graph"] == "NOUN"
    assert by_word["for"] == "ADP"
    assert by_word["can"] == "VERB"


def test_one_is_noun_after_determiner_and_num_otherwise():
    tokens = pos_tag(["the", "battery", "one"])
    assert tokens[2].pos == "NOUN"
    tokens = pos_tag(["one", "chart"])
    assert tokens[0].pos == "NUM"


def test_digits_and_punctuation():
    tokens = pos_tag(["2018", "?"])
    assert [t.pos for t in tokens] == ["NUM", "PUNCT"]


def test_ingest_truncates_to_twenty():
    text = " ".join(["word"] * 25)
    tokens, dropped = ingest_utterance(text)
    assert len(tokens) == 20 and dropped == 5


def test_token_validation():
    with pytest.raises(ValueError):
        Token("", "NOUN")
    with pytest.raises(ValueError):
        Token("x", "NOPE")
