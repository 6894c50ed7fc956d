"""Slot-filler extraction and 11-dimensional semantic vectors.

A slot filler is an utterance phrase expressing one of the ontology's data
attributes. Fillers are detected as unigram/bigram content-word spans close
to a slot prototype, pruned with POS-pattern rules, and projected into the
11-dimensional slot space shared by visualizations and referring
expressions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .ontology import SlotSpace
from .text import CONTENT_POS, Token
from .validation import check_vector_mode

VECTOR_MODES = ("hard", "soft")


@dataclass(frozen=True)
class SlotFiller:
    """Phrase span (end-exclusive) mapped to a parent slot.

    ``value`` is the canonical ontology term identified inside the phrase
    (used for data-query filters and entity labels); it may equal the whole
    surface for multi-word terms.
    """
    begin: int
    end: int
    surface: str
    slot: str
    score: float
    value: str | None = None

    def overlaps(self, begin: int, end: int) -> bool:
        return self.begin < end and begin < self.end

    @property
    def length(self) -> int:
        return self.end - self.begin


def _canonical_value(words: Sequence[str], slot: str, space: SlotSpace) -> str | None:
    terms = set(space.ontology.slot(slot).terms)
    joined = " ".join(w.lower() for w in words)
    if joined in terms:
        return joined
    for w in words:
        if w.lower() in terms:
            return w.lower()
    return None


def detect_slot_candidates(tokens: Sequence[Token], space: SlotSpace) -> list[SlotFiller]:
    """All unigram and adjacent-bigram content-word spans matching a slot.

    Overlapping candidates are retained; pruning happens later.
    """
    candidates = []
    content = [i for i, tok in enumerate(tokens) if tok.pos in CONTENT_POS]
    spans = [(i, i + 1) for i in content]
    spans += [(i, i + 2) for i in content if i + 1 < len(tokens) and tokens[i + 1].pos in CONTENT_POS]
    for begin, end in spans:
        words = [tokens[k].surface for k in range(begin, end)]
        hit = space.nearest_slot(words)
        if hit is None:
            continue
        slot, score = hit
        candidates.append(SlotFiller(
            begin=begin, end=end, surface=" ".join(words), slot=slot,
            score=score, value=_canonical_value(words, slot, space)))
    return candidates


def _of_merges(candidates: list[SlotFiller], tokens: Sequence[Token]) -> list[SlotFiller]:
    """Join candidate pairs linked by an "of" complement into single fillers.

    "months of the year" becomes one filler on the slot of the FIRST
    candidate (MONTH). An optional determiner may sit between "of" and the
    second candidate. The check is pairwise and symmetric in scan order.
    """
    merged = []
    for left in candidates:
        link = left.end
        if link >= len(tokens) or tokens[link].lower != "of" or tokens[link].pos != "ADP":
            continue
        for right in candidates:
            gap = right.begin - link - 1
            if gap == 0 or (gap == 1 and tokens[link + 1].pos == "DET"):
                surface = " ".join(tokens[k].surface for k in range(left.begin, right.end))
                merged.append(SlotFiller(
                    begin=left.begin, end=right.end, surface=surface, slot=left.slot,
                    score=max(left.score, right.score), value=left.value))
    return merged


def prune_and_merge(candidates: Sequence[SlotFiller], tokens: Sequence[Token],
                    ref_span: tuple[int, int] | None = None) -> list[SlotFiller]:
    """Reduce raw candidates to a disjoint filler list.

    Rules, in order: (a) drop candidates overlapping the detected referring
    expression; (b) merge "of"-linked adjacent candidates, keeping the first
    candidate's slot; (c) resolve overlaps by longest span, then highest
    score, then leftmost. Output is sorted by position.
    """
    pool = list(candidates)
    if ref_span is not None:
        pool = [c for c in pool if not c.overlaps(*ref_span)]
    pool = pool + _of_merges(pool, tokens)
    pool.sort(key=lambda c: (-c.length, -c.score, c.begin, c.slot))
    chosen: list[SlotFiller] = []
    for cand in pool:
        if not any(cand.overlaps(c.begin, c.end) for c in chosen):
            chosen.append(cand)
    chosen.sort(key=lambda c: c.begin)
    return chosen


def vectorize(fillers: Sequence[SlotFiller], space: SlotSpace, mode: str = "soft") -> np.ndarray:
    """Project fillers onto the 11 slot dimensions (ontology order).

    hard: dimension i averages the match scores of fillers assigned to slot
    i and is 0 when none are. soft (default): every filler contributes its
    clamped cosine against each prototype, and dimensions average the
    contributions, so related slots receive partial mass. No fillers means
    the zero vector. Fillers are sorted internally, making the result
    exactly permutation-invariant.
    """
    check_vector_mode(mode)
    dims = len(space.slot_names)
    if not fillers:
        return np.zeros(dims)
    ordered = sorted(fillers, key=lambda f: (f.begin, f.end, f.slot, f.surface))
    if mode == "hard":
        sums = np.zeros(dims)
        counts = np.zeros(dims)
        for f in ordered:
            i = space.ontology.index_of(f.slot)
            sums[i] += min(1.0, max(0.0, f.score))
            counts[i] += 1
        return np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    rows = []
    for f in ordered:
        # the canonical term carries the filler's semantics; merged surfaces
        # like "months of the year" would otherwise blur across slots
        vec = space.embed((f.value or f.surface).split())
        rows.append(np.clip(space.prototype_similarities(vec), 0.0, 1.0))
    return np.mean(rows, axis=0)


def entity_pseudo_fillers(entities, space: SlotSpace) -> list[SlotFiller]:
    """Adapt (slot, value) entity pairs to fillers so specs can be vectorized.

    The match score is the value's own prototype cosine, keeping hard-mode
    vectors consistent between live extraction and replayed gold entities.
    """
    fillers = []
    for i, ent in enumerate(entities):
        value = ent.value or ent.slot.lower()
        vec = space.embed(value.split())
        score = float(np.clip(space.prototype_similarities(vec)[space.ontology.index_of(ent.slot)], 0.0, 1.0))
        fillers.append(SlotFiller(begin=i, end=i + 1, surface=value, slot=ent.slot,
                                  score=score, value=ent.value))
    return fillers


class SemanticVectorizer(BaseEstimator, TransformerMixin):
    """Transformer wrapper: lists of filler lists -> (n, 11) array."""

    def __init__(self, space: SlotSpace, mode: str = "soft"):
        self.space = space
        self.mode = mode

    def fit(self, X, y=None):
        check_vector_mode(self.mode)
        return self

    def transform(self, X) -> np.ndarray:
        return np.array([vectorize(fillers, self.space, self.mode) for fillers in X])
