"""Feature template for the reference tagger.

The template is versioned: models record the version they were trained
with and refuse to decode under a different one.
"""
from __future__ import annotations

from typing import Sequence

from .text import Token

TEMPLATE_VERSION = "ref-tagger-template/1"


def word_shape(surface: str) -> str:
    """Capitalization/digit pattern: X for upper, x for lower, d for digit."""
    out = []
    for ch in surface:
        if ch.isdigit():
            out.append("d")
        elif ch.isalpha():
            out.append("X" if ch.isupper() else "x")
        else:
            out.append("-")
    return "".join(out)


def extract_features(tokens: Sequence[Token], index: int) -> list[str]:
    """Deterministic feature ids for one position.

    Covers the word itself (identity, shape, 3-char affixes, POS), the
    immediate left/right word and POS, and boundary markers.
    """
    if not 0 <= index < len(tokens):
        raise IndexError(f"index {index} out of bounds for utterance of length {len(tokens)}")
    tok = tokens[index]
    lower = tok.lower
    feats = [
        "bias",
        f"w={lower}",
        f"shape={word_shape(tok.surface)}",
        f"pre3={lower[:3]}",
        f"suf3={lower[-3:]}",
        f"pos={tok.pos}",
    ]
    if index == 0:
        feats.append("BOS")
    else:
        prev = tokens[index - 1]
        feats.append(f"w-1={prev.lower}")
        feats.append(f"pos-1={prev.pos}")
    if index == len(tokens) - 1:
        feats.append("EOS")
    else:
        nxt = tokens[index + 1]
        feats.append(f"w+1={nxt.lower}")
        feats.append(f"pos+1={nxt.pos}")
    return feats
