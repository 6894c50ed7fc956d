"""Span-level scoring for IOB2 tag sequences."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .validation import check_parallel


def extract_spans(tags: Sequence[str]) -> list[tuple[int, int]]:
    """(begin, end) token spans, end-exclusive, one per B-REF opening."""
    spans = []
    start = None
    for i, tag in enumerate(tags):
        if tag == "B-REF":
            if start is not None:
                spans.append((start, i))
            start = i
        elif tag == "I-REF":
            continue
        else:
            if start is not None:
                spans.append((start, i))
                start = None
    if start is not None:
        spans.append((start, len(tags)))
    return spans


@dataclass(frozen=True)
class SpanScores:
    precision: float
    recall: float
    f1: float
    true_positives: int
    false_positives: int
    false_negatives: int


def span_f1(gold: Sequence[Sequence[str]], predicted: Sequence[Sequence[str]]) -> SpanScores:
    """Micro-averaged exact-match span precision/recall/F1.

    A predicted span counts as a true positive only when both its begin and
    end match a gold span; partial overlap is a miss.
    """
    check_parallel("gold", gold, "predicted", predicted)
    tp = fp = fn = 0
    for g_tags, p_tags in zip(gold, predicted):
        check_parallel("gold tags", g_tags, "predicted tags", p_tags)
        g_spans = set(extract_spans(g_tags))
        p_spans = set(extract_spans(p_tags))
        tp += len(g_spans & p_spans)
        fp += len(p_spans - g_spans)
        fn += len(g_spans - p_spans)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return SpanScores(precision, recall, f1, tp, fp, fn)


def token_accuracy(gold: Sequence[Sequence[str]], predicted: Sequence[Sequence[str]]) -> float:
    """Fraction of positions tagged identically."""
    check_parallel("gold", gold, "predicted", predicted)
    total = correct = 0
    for g_tags, p_tags in zip(gold, predicted):
        check_parallel("gold tags", g_tags, "predicted tags", p_tags)
        total += len(g_tags)
        correct += sum(1 for g, p in zip(g_tags, p_tags) if g == p)
    return correct / total if total else 0.0
