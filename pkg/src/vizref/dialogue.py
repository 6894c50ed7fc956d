"""Information-state dialogue engine.

Each user turn becomes a user action frame; the dialogue manager resolves
any visualization reference against the recency-weighted dialogue history,
establishes or manages visualization entities, and emits an agent action
frame (structurally identical to the user frame) plus an updated screen
state. One session is one strictly serialized event loop; distinct sessions
are independent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .metrics import extract_spans
from .ontology import SlotSpace, cosine
from .queries import DataQuery, IncidentTable, build_data_query
from .semantics import SlotFiller, detect_slot_candidates, entity_pseudo_fillers, prune_and_merge, vectorize
from .text import MAX_UTTERANCE_TOKENS, Token, ingest_utterance
from .validation import check_iob2, check_parallel, check_unit_interval, check_vector_mode, check_window

PLOT_TYPES = ("bar", "line", "heatmap")
CORE_INTENTS = ("CREATEVIS", "MODIFYVIS", "WINMGMT")
DEFAULT_EXTRA_INTENTS = ("OBSERVATION", "REQUESTINFO", "PREFERENCE", "GREETING", "OTHER")
SPEC_SCHEMA = "vizspec/1"

WINDOW_UNLIMITED = None


# --------------------------------------------------------------------------
# frame and state types


@dataclass(frozen=True)
class Entity:
    slot: str
    value: str | None

    def to_payload(self) -> dict:
        return {"slot": self.slot, "value": self.value}


@dataclass(frozen=True)
class TextRef:
    begin: int
    end: int
    surface: str

    def to_payload(self) -> dict:
        return {"begin": self.begin, "end": self.end, "surface": self.surface}


@dataclass(frozen=True)
class GestureEvent:
    target_id: str
    turn: int

    def to_payload(self) -> dict:
        return {"target_id": self.target_id, "turn": self.turn}


@dataclass
class Attributes:
    plot_type: str | None = None
    x_axis: str | None = None
    y_axis: str | None = None
    entities: list[Entity] = field(default_factory=list)
    title: str | None = None

    def to_payload(self) -> dict:
        return {
            "plot_type": self.plot_type,
            "x_axis": self.x_axis,
            "y_axis": self.y_axis,
            "entities": [e.to_payload() for e in self.entities],
            "title": self.title,
        }


@dataclass
class ActionFrame:
    role: str
    intent: str
    tokens: list[Token] = field(default_factory=list)
    text_ref: TextRef | None = None
    gest_ref: bool = False
    gesture: GestureEvent | None = None
    fillers: list[SlotFiller] = field(default_factory=list)
    ref_fillers: list[SlotFiller] = field(default_factory=list)
    referent_id: str | None = None
    resolution_failed: bool = False
    low_confidence: bool = False
    win_op: str | None = None
    attributes: Attributes = field(default_factory=Attributes)
    data_query: DataQuery | None = None
    response_text: str | None = None
    diagnostics: dict = field(default_factory=dict)

    def to_payload(self) -> dict:
        return {
            "role": self.role,
            "intent": self.intent,
            "tokens": [t.surface for t in self.tokens],
            "text_ref": self.text_ref.to_payload() if self.text_ref else None,
            "gest_ref": self.gest_ref,
            "gesture": self.gesture.to_payload() if self.gesture else None,
            "fillers": [_filler_payload(f) for f in self.fillers],
            "ref_fillers": [_filler_payload(f) for f in self.ref_fillers],
            "referent_id": self.referent_id,
            "resolution_failed": self.resolution_failed,
            "low_confidence": self.low_confidence,
            "win_op": self.win_op,
            "attributes": self.attributes.to_payload(),
            "data_query": self.data_query.to_payload() if self.data_query else None,
            "response_text": self.response_text,
            "diagnostics": self.diagnostics,
        }


def _filler_payload(f: SlotFiller) -> dict:
    return {"begin": f.begin, "end": f.end, "surface": f.surface, "slot": f.slot,
            "score": round(f.score, 6), "value": f.value}


@dataclass
class VisualizationSpec:
    id: str
    plot_type: str
    x_axis: str | None
    y_axis: str
    entities: list[Entity]
    title: str
    vector: np.ndarray
    created_at: int
    layout: dict = field(default_factory=lambda: {"state": "normal", "raised_at": None})
    data_rows: list[dict] = field(default_factory=list)
    query: DataQuery | None = None

    def to_payload(self) -> dict:
        """Wire format; field names and order are frozen (golden-file tested)."""
        return {
            "schema": SPEC_SCHEMA,
            "id": self.id,
            "plot_type": self.plot_type,
            "axes": {"x": self.x_axis, "y": self.y_axis},
            "entities": [e.to_payload() for e in self.entities],
            "title": self.title,
            "data": self.data_rows,
            "semantic_vector": [round(float(v), 9) for v in self.vector],
            "layout": dict(self.layout),
            "created_at": self.created_at,
        }


class DialogueHistory:
    """Ordered record of the visualizations currently on screen."""

    def __init__(self):
        self.entries: list[VisualizationSpec] = []

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.entries]

    def add(self, spec: VisualizationSpec) -> None:
        if spec.id in self.ids:
            raise ValueError(f"duplicate visualization id {spec.id}")
        self.entries.append(spec)

    def remove(self, spec_id: str) -> None:
        self.entries = [e for e in self.entries if e.id != spec_id]

    def get(self, spec_id: str) -> VisualizationSpec | None:
        for e in self.entries:
            if e.id == spec_id:
                return e
        return None

    def most_recent_first(self, window: int | None = WINDOW_UNLIMITED) -> list[VisualizationSpec]:
        if window == 0:
            return []
        pool = self.entries if window is None else self.entries[-window:]
        return list(reversed(pool))

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class EngineConfig:
    window: int | None = WINDOW_UNLIMITED
    cutoff: float = 0.2
    vector_mode: str = "soft"
    max_tokens: int = MAX_UTTERANCE_TOKENS

    def validate(self) -> "EngineConfig":
        check_window(self.window)
        check_unit_interval("cutoff", self.cutoff)
        check_vector_mode(self.vector_mode)
        return self


@dataclass
class SessionState:
    config: EngineConfig
    history: DialogueHistory = field(default_factory=DialogueHistory)
    transcript: list = field(default_factory=list)
    turn: int = 0
    next_seq: int = 1

    def allocate_id(self) -> str:
        spec_id = f"{self.next_seq:02d}"
        self.next_seq += 1
        return spec_id


# --------------------------------------------------------------------------
# intent classification


@dataclass(frozen=True)
class IntentRules:
    """Keyword tables driving the rule-based intent stand-in."""
    window_ops: dict = field(default_factory=lambda: {
        "close": "close", "shut": "close", "move": "move", "drag": "move",
        "maximize": "maximize", "minimize": "minimize",
    })
    window_bigrams: dict = field(default_factory=lambda: {("bring", "up"): "raise"})
    creation_verbs: frozenset = field(default_factory=lambda: frozenset([
        "show", "shows", "see", "display", "view", "give", "have", "create",
        "make", "draw", "visualize", "plot", "compare", "break", "split", "add",
    ]))


DEFAULT_INTENT_RULES = IntentRules()


def classify_intent(tokens: Sequence[Token], has_text_ref: bool, has_gesture: bool = False,
                    rules: IntentRules = DEFAULT_INTENT_RULES) -> tuple[str, bool, str | None]:
    """Rule-based intent: returns (intent, low_confidence, window_op).

    Corpus replay bypasses this and uses annotated intent.
    """
    words = [t.lower for t in tokens]
    for i, w in enumerate(words):
        if w in rules.window_ops:
            return "WINMGMT", False, rules.window_ops[w]
        if i + 1 < len(words) and (w, words[i + 1]) in rules.window_bigrams:
            return "WINMGMT", False, rules.window_bigrams[(w, words[i + 1])]
    has_creation = any(w in rules.creation_verbs for w in words)
    if has_creation and (has_text_ref or has_gesture):
        return "MODIFYVIS", False, None
    if has_creation:
        return "CREATEVIS", False, None
    return "CREATEVIS", True, None


# --------------------------------------------------------------------------
# user action construction


def build_user_action(tokens: Sequence[Token], tags: Sequence[str], space: SlotSpace,
                      gesture: GestureEvent | None = None, intent: str | None = None,
                      rules: IntentRules = DEFAULT_INTENT_RULES) -> ActionFrame:
    """Assemble the user action frame from tagged text and an optional gesture.

    Only the first reference span is processed (single-reference policy);
    extra spans land in diagnostics. A pointing gesture counts as referential
    only when it co-occurs with a text reference. Slot fillers are extracted
    outside the reference span; candidates inside it are kept separately to
    score the referring expression itself.
    """
    check_parallel("tokens", tokens, "tags", tags)
    check_iob2(tags)
    diagnostics: dict = {}
    spans = extract_spans(tags)
    text_ref = None
    if spans:
        begin, end = spans[0]
        text_ref = TextRef(begin, end, " ".join(tokens[i].surface for i in range(begin, end)))
        if len(spans) > 1:
            diagnostics["extra_reference_spans"] = [list(s) for s in spans[1:]]

    gest_ref = gesture is not None and text_ref is not None
    candidates = detect_slot_candidates(tokens, space)
    ref_span = (text_ref.begin, text_ref.end) if text_ref else None
    fillers = prune_and_merge(candidates, tokens, ref_span=ref_span)
    ref_fillers = []
    if ref_span is not None:
        inside = [c for c in candidates if c.overlaps(*ref_span)]
        ref_fillers = prune_and_merge(inside, tokens)

    low_confidence = False
    win_op = None
    if intent is None:
        intent, low_confidence, win_op = classify_intent(
            tokens, text_ref is not None, gesture is not None, rules)
    else:
        _, _, win_op = classify_intent(tokens, text_ref is not None, gesture is not None, rules)

    return ActionFrame(
        role="user", intent=intent, tokens=list(tokens), text_ref=text_ref,
        gest_ref=gest_ref, gesture=gesture, fillers=fillers, ref_fillers=ref_fillers,
        low_confidence=low_confidence, win_op=win_op, diagnostics=diagnostics)


# --------------------------------------------------------------------------
# reference resolution


def recency_weights(n: int) -> list[float]:
    """Multiplicative salience factors, most-recent first.

    The most recent ceil(n/2) entries weigh 1.0; the rest decrease linearly
    to exactly 0 at the oldest entry: weight(r) = (n - r) / (n - ceil(n/2)).
    """
    if n < 0:
        raise ValueError("history size must be non-negative")
    k = math.ceil(n / 2)
    weights = []
    for r in range(1, n + 1):
        if r <= k:
            weights.append(1.0)
        else:
            weights.append((n - r) / (n - k))
    return weights


def resolve_reference(frame: ActionFrame, history: DialogueHistory,
                      window: int | None, cutoff: float, space: SlotSpace,
                      mode: str = "soft",
                      decay: Callable[[int], list[float]] = recency_weights,
                      ) -> tuple[str, float] | None:
    """Select the referent visualization, or None when resolution fails.

    Candidates are the ``window`` most recent history entries. A referential
    gesture returns its target iff the target is in the candidate set (no
    text fallback). A text reference scores each candidate as
    recency_weight * cosine(referring-expression vector, candidate vector)
    and wins only by strictly exceeding the cutoff; ties break toward the
    more recent entry. Resolution never guesses: window 0 or an empty
    history always fails.
    """
    candidates = history.most_recent_first(window)
    if not candidates:
        return None
    if frame.gest_ref and frame.gesture is not None:
        if frame.gesture.target_id in [c.id for c in candidates]:
            return frame.gesture.target_id, 1.0
        return None
    if frame.text_ref is None:
        return None
    ref_vector = vectorize(list(frame.fillers) + list(frame.ref_fillers), space, mode)
    weights = decay(len(candidates))
    best: tuple[str, float] | None = None
    for weight, cand in zip(weights, candidates):
        score = weight * cosine(ref_vector, cand.vector)
        if score > cutoff and (best is None or score > best[1]):
            best = (cand.id, score)
    return best


# --------------------------------------------------------------------------
# new entity establishment


def infer_plot_type(entities: Sequence[Entity], space: SlotSpace,
                    tokens: Sequence[Token] | None = None,
                    exclude_span: tuple[int, int] | None = None) -> str:
    """Rule table for the chart kind.

    An explicit lexical cue ("map", "heat map", outside any reference span)
    or a spatial slot with no temporal one selects heatmap; any temporal
    slot selects line; bar is the default.
    """
    if tokens is not None:
        for i, tok in enumerate(tokens):
            if exclude_span is not None and exclude_span[0] <= i < exclude_span[1]:
                continue
            if tok.lower in ("map", "heatmap") or (
                    tok.lower == "heat" and i + 1 < len(tokens) and tokens[i + 1].lower == "map"):
                return "heatmap"
    kinds = {space.ontology.kind_of(e.slot) for e in entities}
    if "spatial" in kinds and "temporal" not in kinds:
        return "heatmap"
    if "temporal" in kinds:
        return "line"
    return "bar"


def merge_entities(fillers: Sequence[SlotFiller], referent_entities: Sequence[Entity],
                   ontology) -> list[Entity]:
    """Combine this turn's fillers with inherited referent entities.

    A new filler supersedes an inherited entity in place when it names the
    same slot, or the same kind for temporal/spatial kinds (one time axis,
    one place per spec); categorical entities on other slots accumulate.
    """
    result = list(referent_entities)
    for f in fillers:
        new_ent = Entity(slot=f.slot, value=f.value)
        kind = ontology.kind_of(f.slot)
        replaced = False
        for i, existing in enumerate(result):
            same_slot = existing.slot == f.slot
            same_axis = kind in ("temporal", "spatial") and ontology.kind_of(existing.slot) == kind
            if same_slot or same_axis:
                result[i] = new_ent
                replaced = True
                break
        if not replaced:
            result.append(new_ent)
    return result


def make_title(entities: Sequence[Entity], x_axis: str | None, space: SlotSpace) -> str:
    def pretty_slot(name: str) -> str:
        return " ".join(p.capitalize() for p in name.lower().split("_"))

    head = "Incidents"
    rest = []
    seen_head = False
    for ent in entities:
        kind = space.ontology.kind_of(ent.slot)
        if kind == "temporal" or ent.value is None:
            continue
        label = ent.value.title()
        if not seen_head and kind == "categorical":
            head = label
            seen_head = True
        elif ent.slot != x_axis:
            rest.append(label)
    title = head
    if rest:
        title += " in " + ", ".join(rest)
    if x_axis is not None:
        title += " by " + pretty_slot(x_axis)
    return title


def establish_entity(frame: ActionFrame, referent: VisualizationSpec | None,
                     state: SessionState, space: SlotSpace, table: IncidentTable,
                     turn: int) -> tuple[ActionFrame, VisualizationSpec]:
    """Create the next visualization spec and the agent frame announcing it.

    A modify request inherits the referent's entities except those
    superseded by a same-kind filler; the semantic vector and data query are
    recomputed from the final entity list.
    """
    if frame.intent == "MODIFYVIS" and referent is None:
        raise ValueError("modify requests require a resolved referent")
    referent_entities = referent.entities if referent is not None else []
    entities = merge_entities(frame.fillers, referent_entities, space.ontology)
    query = build_data_query(entities, space.ontology, table)
    exclude = (frame.text_ref.begin, frame.text_ref.end) if frame.text_ref else None
    plot_type = infer_plot_type(entities, space, frame.tokens, exclude_span=exclude)
    x_axis = query.group_by
    vector = vectorize(entity_pseudo_fillers(entities, space), space, state.config.vector_mode)
    spec = VisualizationSpec(
        id=state.allocate_id(), plot_type=plot_type, x_axis=x_axis, y_axis="count",
        entities=entities, title=make_title(entities, x_axis, space), vector=vector,
        created_at=turn, data_rows=query.rows, query=query)
    state.history.add(spec)

    agent = ActionFrame(
        role="agent", intent=frame.intent, tokens=[], text_ref=frame.text_ref,
        gest_ref=frame.gest_ref, gesture=frame.gesture, fillers=list(frame.fillers),
        ref_fillers=list(frame.ref_fillers),
        referent_id=referent.id if referent is not None else None,
        attributes=Attributes(plot_type=plot_type, x_axis=x_axis, y_axis="count",
                              entities=list(entities), title=spec.title),
        data_query=query,
        response_text=f"Added visualization {spec.id}: {spec.title}")
    return agent, spec


def apply_window_management(frame: ActionFrame, referent_id: str,
                            state: SessionState, turn: int) -> ActionFrame:
    """Execute a window operation on a resolved referent.

    close removes the entry from the history; move/maximize/minimize/raise
    only update layout metadata and keep the entry.
    """
    op = frame.win_op or "move"
    spec = state.history.get(referent_id)
    if spec is None:
        raise ValueError(f"referent {referent_id} is not on screen")
    if op == "close":
        state.history.remove(referent_id)
    elif op == "maximize":
        spec.layout["state"] = "maximized"
    elif op == "minimize":
        spec.layout["state"] = "minimized"
    else:  # move / raise
        spec.layout["raised_at"] = turn
    return ActionFrame(
        role="agent", intent="WINMGMT", tokens=[], text_ref=frame.text_ref,
        gest_ref=frame.gest_ref, gesture=frame.gesture, referent_id=referent_id,
        win_op=op, response_text=f"Applied {op} to visualization {referent_id}")


CLARIFY_REFERENCE = ("I could not tell which visualization you mean. "
                     "Please point at it or name one of its attributes.")
CLARIFY_REQUEST = ("I can create, modify, or manage visualizations. "
                   "What would you like to see?")


def clarification_frame(frame: ActionFrame, reason: str) -> ActionFrame:
    return ActionFrame(
        role="agent", intent=frame.intent, tokens=[], text_ref=frame.text_ref,
        gest_ref=frame.gest_ref, gesture=frame.gesture, resolution_failed=True,
        response_text=reason)


# --------------------------------------------------------------------------
# engine


@dataclass
class TurnResult:
    turn: int
    user_frame: ActionFrame
    agent_frame: ActionFrame
    screen: dict
    clarification: bool


class DialogueEngine:
    """Binds the slot space, tagger, and data table into a turn processor.

    The engine itself is stateless across sessions; all mutable information
    lives in each SessionState, and process_turn must be called serially per
    session (the service enforces this with a per-session lock).
    """

    def __init__(self, space: SlotSpace, table: IncidentTable, tagger=None,
                 config: EngineConfig | None = None, rules: IntentRules = DEFAULT_INTENT_RULES):
        self.space = space
        self.table = table
        self.tagger = tagger
        self.config = (config or EngineConfig()).validate()
        self.rules = rules

    def new_state(self, config: EngineConfig | None = None) -> SessionState:
        return SessionState(config=(config or replace(self.config)).validate())

    def screen_payload(self, state: SessionState) -> dict:
        return {
            "specs": [spec.to_payload() for spec in state.history.entries],
            "layout": {"order": state.history.ids},
        }

    def process_turn(self, state: SessionState, text: str,
                     gesture_target: str | None = None) -> TurnResult:
        turn = state.turn + 1
        tokens, dropped = ingest_utterance(text, state.config.max_tokens)
        if not tokens:
            raise ValueError("utterance is empty after tokenization")
        tags = self.tagger.decode(tokens) if self.tagger is not None else ["O"] * len(tokens)

        gesture = None
        gesture_note = None
        if gesture_target is not None:
            if state.history.get(gesture_target) is not None:
                gesture = GestureEvent(target_id=gesture_target, turn=turn)
            else:
                gesture_note = f"gesture target {gesture_target} is not on screen; ignored"

        frame = build_user_action(tokens, tags, self.space, gesture=gesture, rules=self.rules)
        if dropped:
            frame.diagnostics["truncated_tokens"] = dropped
        if gesture_note:
            frame.diagnostics["gesture"] = gesture_note

        agent = self._dispatch(frame, state, turn)
        screen = self.screen_payload(state)
        result = TurnResult(turn=turn, user_frame=frame, agent_frame=agent, screen=screen,
                            clarification=agent.resolution_failed)
        state.transcript.append({
            "turn": turn,
            "text": text,
            "gesture_target": gesture_target,
            "user_frame": frame.to_payload(),
            "agent_frame": agent.to_payload(),
            "screen": screen,
        })
        state.turn = turn
        return result

    def _dispatch(self, frame: ActionFrame, state: SessionState, turn: int) -> ActionFrame:
        cfg = state.config
        if frame.intent in ("MODIFYVIS", "WINMGMT"):
            resolution = resolve_reference(frame, state.history, cfg.window, cfg.cutoff,
                                           self.space, cfg.vector_mode)
            if resolution is None:
                return clarification_frame(frame, CLARIFY_REFERENCE)
            referent_id, score = resolution
            frame.referent_id = referent_id
            frame.diagnostics["resolution_score"] = round(score, 6)
            if frame.intent == "WINMGMT":
                return apply_window_management(frame, referent_id, state, turn)
            return establish_entity(frame, state.history.get(referent_id), state,
                                    self.space, self.table, turn)[0]
        if frame.intent == "CREATEVIS":
            if frame.low_confidence and not frame.fillers and frame.text_ref is None:
                return clarification_frame(frame, CLARIFY_REQUEST)
            return establish_entity(frame, None, state, self.space, self.table, turn)[0]
        ack = ActionFrame(role="agent", intent=frame.intent, response_text="Noted.")
        return ack
