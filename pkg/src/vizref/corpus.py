"""Corpus records: line-delimited serialization with integrity validation.

Each line is one JSON record for one utterance turn, carrying tokens, coarse
POS, gold IOB2 reference tags, gold slot fillers, gold intent, optional
gesture, gold referent id, gold created visualization, and the window
operation for management turns. Records are grouped by session and ordered
by turn index; referent ids must name visualizations created earlier in the
same session.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CorpusIntegrityError
from .text import COARSE_POS, Token
from .validation import IOB2_TAGS

CORPUS_SCHEMA = "viz-dialogue-corpus/1"
SEGMENTS = ("setup", "request", "conclusion")


@dataclass
class GoldFiller:
    begin: int
    end: int
    surface: str
    slot: str
    value: str | None

    def to_payload(self) -> dict:
        return {"begin": self.begin, "end": self.end, "surface": self.surface,
                "slot": self.slot, "value": self.value}


@dataclass
class GoldSpec:
    id: str
    plot_type: str
    entities: list[dict]
    title: str

    def to_payload(self) -> dict:
        return {"id": self.id, "plot_type": self.plot_type,
                "entities": self.entities, "title": self.title}


@dataclass
class CorpusRecord:
    session_id: str
    turn_index: int
    segment: str
    tokens: list[str]
    pos: list[str]
    tags: list[str]
    intent: str
    gesture_target: str | None = None
    fillers: list[GoldFiller] = field(default_factory=list)
    referent_id: str | None = None
    new_spec: GoldSpec | None = None
    win_op: str | None = None

    def to_payload(self) -> dict:
        return {
            "schema": CORPUS_SCHEMA,
            "session_id": self.session_id,
            "turn_index": self.turn_index,
            "segment": self.segment,
            "tokens": self.tokens,
            "pos": self.pos,
            "tags": self.tags,
            "intent": self.intent,
            "gesture": {"target_id": self.gesture_target} if self.gesture_target else None,
            "fillers": [f.to_payload() for f in self.fillers],
            "referent_id": self.referent_id,
            "new_spec": self.new_spec.to_payload() if self.new_spec else None,
            "win_op": self.win_op,
        }

    def token_objects(self) -> list[Token]:
        return [Token(surface, pos) for surface, pos in zip(self.tokens, self.pos)]

    @property
    def has_text_ref(self) -> bool:
        return any(t == "B-REF" for t in self.tags)


def _record_from_payload(raw: dict, line_no: int) -> CorpusRecord:
    def fail(msg: str):
        raise CorpusIntegrityError(f"line {line_no}: {msg}",
                                   session_id=raw.get("session_id"),
                                   turn_index=raw.get("turn_index"))

    if raw.get("schema") != CORPUS_SCHEMA:
        fail(f"unsupported schema {raw.get('schema')!r}")
    for key in ("session_id", "turn_index", "segment", "tokens", "pos", "tags", "intent"):
        if key not in raw:
            fail(f"missing field {key!r}")
    if raw["segment"] not in SEGMENTS:
        fail(f"segment must be one of {SEGMENTS}")
    tokens, pos, tags = raw["tokens"], raw["pos"], raw["tags"]
    if not (len(tokens) == len(pos) == len(tags)):
        fail("tokens, pos and tags must be parallel arrays")
    if not tokens:
        fail("empty utterance")
    if len(tokens) > 20:
        fail("utterances are capped at 20 tokens")
    for p in pos:
        if p not in COARSE_POS:
            fail(f"unknown POS tag {p!r}")
    prev = "O"
    for i, tag in enumerate(tags):
        if tag not in IOB2_TAGS:
            fail(f"unknown tag {tag!r}")
        if tag == "I-REF" and (i == 0 or prev == "O"):
            fail("tags are not IOB2-valid")
        prev = tag
    fillers = []
    for f in raw.get("fillers", []):
        if not (0 <= f["begin"] < f["end"] <= len(tokens)):
            fail(f"filler span [{f['begin']}, {f['end']}) out of bounds")
        fillers.append(GoldFiller(f["begin"], f["end"], f["surface"], f["slot"], f.get("value")))
    gesture = raw.get("gesture")
    new_spec = None
    if raw.get("new_spec"):
        ns = raw["new_spec"]
        new_spec = GoldSpec(ns["id"], ns["plot_type"], ns["entities"], ns.get("title", ""))
    return CorpusRecord(
        session_id=raw["session_id"], turn_index=raw["turn_index"], segment=raw["segment"],
        tokens=tokens, pos=pos, tags=tags, intent=raw["intent"],
        gesture_target=gesture["target_id"] if gesture else None,
        fillers=fillers, referent_id=raw.get("referent_id"),
        new_spec=new_spec, win_op=raw.get("win_op"))


def validate_corpus(records: list[CorpusRecord]) -> None:
    """Cross-record checks: per-session turn order and referential integrity."""
    on_screen: dict[str, set[str]] = {}
    created: dict[str, set[str]] = {}
    last_turn: dict[str, int] = {}
    for rec in records:
        sid = rec.session_id
        screen = on_screen.setdefault(sid, set())
        seen = created.setdefault(sid, set())
        if sid in last_turn and rec.turn_index <= last_turn[sid]:
            raise CorpusIntegrityError("turn indices must strictly increase",
                                       session_id=sid, turn_index=rec.turn_index)
        last_turn[sid] = rec.turn_index
        if rec.referent_id is not None and rec.referent_id not in seen:
            raise CorpusIntegrityError(
                f"referent {rec.referent_id} was never created", session_id=sid,
                turn_index=rec.turn_index)
        if rec.gesture_target is not None and rec.gesture_target not in screen:
            raise CorpusIntegrityError(
                f"gesture target {rec.gesture_target} is not on screen", session_id=sid,
                turn_index=rec.turn_index)
        if rec.new_spec is not None:
            if rec.new_spec.id in seen:
                raise CorpusIntegrityError(
                    f"duplicate visualization id {rec.new_spec.id}", session_id=sid,
                    turn_index=rec.turn_index)
            seen.add(rec.new_spec.id)
            screen.add(rec.new_spec.id)
        if rec.win_op == "close" and rec.referent_id is not None:
            screen.discard(rec.referent_id)


def load_corpus(path: str | Path) -> list[CorpusRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusIntegrityError(f"line {line_no}: invalid JSON ({exc})") from exc
            records.append(_record_from_payload(raw, line_no))
    validate_corpus(records)
    return records


def save_corpus(records: list[CorpusRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_payload()) + "\n")


def sessions_of(records: list[CorpusRecord]) -> dict[str, list[CorpusRecord]]:
    grouped: dict[str, list[CorpusRecord]] = {}
    for rec in records:
        grouped.setdefault(rec.session_id, []).append(rec)
    return grouped
