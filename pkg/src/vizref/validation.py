"""Input validation helpers shared by the public entry points."""
from __future__ import annotations

from typing import Sequence

from .errors import ConfigValidationError

IOB2_TAGS = ("B-REF", "I-REF", "O")


def check_nonempty_sequence(name: str, seq: Sequence) -> None:
    if len(seq) == 0:
        raise ValueError(f"{name} must be non-empty")


def check_parallel(name_a: str, a: Sequence, name_b: str, b: Sequence) -> None:
    if len(a) != len(b):
        raise ValueError(f"{name_a} and {name_b} must have equal length ({len(a)} != {len(b)})")


def check_iob2(tags: Sequence[str]) -> None:
    """Reject tag sequences where I-REF follows O or starts the sequence."""
    prev = "O"
    for i, tag in enumerate(tags):
        if tag not in IOB2_TAGS:
            raise ValueError(f"unknown tag {tag!r} at position {i}")
        if tag == "I-REF" and (i == 0 or prev == "O"):
            raise ValueError(f"invalid IOB2 sequence: I-REF at position {i} follows {'start' if i == 0 else 'O'}")
        prev = tag


def check_unit_interval(name: str, value: float) -> None:
    if not isinstance(value, (int, float)) or not (0.0 <= value <= 1.0):
        raise ConfigValidationError(f"{name} must be in [0, 1], got {value!r}")


def check_window(window: int | None) -> None:
    """A candidate window is a non-negative entry count, or None for unlimited."""
    if window is None:
        return
    if not isinstance(window, int) or isinstance(window, bool) or window < 0:
        raise ConfigValidationError(f"window must be a non-negative integer or None, got {window!r}")


def check_vector_mode(mode: str) -> None:
    if mode not in ("hard", "soft"):
        raise ConfigValidationError(f"vector mode must be 'hard' or 'soft', got {mode!r}")
