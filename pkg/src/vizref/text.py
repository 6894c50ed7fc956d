"""Tokens, tokenization, and the rule-based fallback POS tagger.

Utterances reach the engine either pre-tagged (corpus rows carry gold POS)
or as raw text, in which case the fallback tagger below assigns coarse tags
from closed-class word lists and a few suffix rules.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

COARSE_POS = frozenset(
    ["NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM", "CONJ", "PRT", "PUNCT", "X"]
)

#: POS classes whose tokens may head a slot-filler candidate.
CONTENT_POS = frozenset(["NOUN", "ADJ", "NUM", "X"])

MAX_UTTERANCE_TOKENS = 20


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if self.pos not in COARSE_POS:
            raise ValueError(f"unknown coarse POS tag {self.pos!r}")

    @property
    def lower(self) -> str:
        return self.surface.lower()


_TOKEN_RE = re.compile(r"[A-Za-z0-9']+|[^\sA-Za-z0-9']")

_CLOSED = {
    "DET": {"the", "a", "an", "this", "that", "these", "those", "some", "any", "each", "every", "no"},
    "PRON": {
        "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them",
        "my", "your", "his", "its", "our", "their", "mine", "yours", "something", "anything",
    },
    "ADP": {
        "of", "in", "on", "at", "by", "for", "with", "from", "to", "into", "over", "under",
        "near", "behind", "across", "per", "after", "before", "between", "through", "during",
        "versus", "against",
    },
    "CONJ": {"and", "or", "but", "nor", "so", "yet", "if", "when", "while"},
    "PRT": {"up", "down", "off", "out", "not"},
    "ADV": {
        "here", "there", "now", "then", "very", "really", "quite", "also", "just", "still",
        "already", "too", "instead", "again", "maybe", "perhaps", "please", "well", "overall",
        "only", "rather",
    },
    "ADJ": {
        "interesting", "higher", "lower", "high", "low", "more", "most", "clear", "clearer",
        "crowded", "safe", "dangerous", "big", "small", "new", "old", "same", "different",
        "last", "recent", "busy", "quiet", "worst", "safest", "total", "frequent", "common",
        "violent", "useful", "steady", "sharp",
    },
    "VERB": {
        "can", "could", "would", "should", "will", "may", "might", "must",
        "is", "are", "was", "were", "be", "been", "am", "do", "does", "did",
        "have", "has", "had", "let's", "lets",
        "show", "shows", "showed", "see", "saw", "display", "displays", "give", "gives",
        "make", "makes", "made", "create", "creates", "draw", "draws", "visualize",
        "compare", "compares", "add", "adds", "remove", "removes", "close", "closes",
        "open", "opens", "move", "moves", "maximize", "maximizes", "minimize", "minimizes",
        "bring", "brings", "break", "breaks", "look", "looks", "want", "wants", "need",
        "needs", "think", "go", "goes", "seem", "seems", "wonder", "guess", "get", "keep",
        "put", "spike", "spikes", "peak", "peaks", "drop", "drops", "happen", "happens",
        "focus", "stick", "try", "say", "know", "notice", "expect",
    },
    "NUM": {"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten"},
}

_DIGIT_RE = re.compile(r"^\d+(\.\d+)?$")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text)


def pos_tag_word(word: str) -> str:
    lower = word.lower()
    if not any(c.isalnum() for c in word):
        return "PUNCT"
    if _DIGIT_RE.match(lower):
        return "NUM"
    for pos in ("DET", "PRON", "ADP", "CONJ", "PRT", "ADV", "ADJ", "VERB", "NUM"):
        if lower in _CLOSED[pos]:
            return pos
    if lower.endswith("ly"):
        return "ADV"
    if lower.endswith("ing") or lower.endswith("ed"):
        return "VERB"
    return "NOUN"


def pos_tag(words: Sequence[str]) -> list[Token]:
    """Tag a word sequence with coarse POS.

    'one' is NUM in the closed list except after a determiner, where it acts
    as an anaphoric head noun ("the battery one").
    """
    tokens = []
    for i, word in enumerate(words):
        pos = pos_tag_word(word)
        if pos == "NUM" and word.lower() == "one" and i > 0 and pos_tag_word(words[i - 1]) in ("DET", "NOUN", "ADJ"):
            pos = "NOUN"
        tokens.append(Token(word, pos))
    return tokens


def ingest_utterance(text: str, max_tokens: int = MAX_UTTERANCE_TOKENS) -> tuple[list[Token], int]:
    """Tokenize, tag, and truncate raw text.

    Returns the token list and the number of tokens dropped by truncation
    (recorded by callers in turn diagnostics).
    """
    words = tokenize(text)
    dropped = max(0, len(words) - max_tokens)
    return pos_tag(words[:max_tokens]), dropped
