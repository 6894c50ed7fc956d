import pytest

from vizref.features import extract_features, word_shape
from vizref.text import pos_tag, tokenize

EXAMPLE = "Ok let's have a look at can you have this graph for months of the year"


def tokens_of(text):
    return pos_tag(tokenize(text))


def test_worked_example_position_nine():
    tokens = tokens_of(EXAMPLE)
    assert tokens[9].surface == "this"
    feats = extract_features(tokens, 9)
    assert "w=this" in feats
    assert "pos=DET" in feats
    assert "w+1=graph" in feats
    assert "w-1=have" in feats


def test_sequence_start_has_bos_and_no_left_context():
    feats = extract_features(tokens_of(EXAMPLE), 0)
    assert "BOS" in feats
    assert not any(f.startswith("w-1=") or f.startswith("pos-1=") for f in feats)


def test_single_token_has_both_boundary_markers():
    feats = extract_features(tokens_of("hello"), 0)
    assert "BOS" in feats and "EOS" in feats


def test_extraction_is_pure():
    tokens = tokens_of(EXAMPLE)
    assert extract_features(tokens, 5) == extract_features(tokens, 5)


def test_out_of_bounds_raises():
    with pytest.raises(IndexError):
        extract_features(tokens_of("hello"), 1)


@pytest.mark.parametrize("surface,shape", [
    ("This", "Xxxx"),
    ("graph", "xxxxx"),
    ("2018", "dddd"),
    ("let's", "xxx-x"),
])
def test_word_shape(surface, shape):
    assert word_shape(surface) == shape


def test_affix_features():
    tokens = tokens_of("visualization")
    feats = extract_features(tokens, 0)
    assert "pre3=vis" in feats and "suf3=ion" in feats
