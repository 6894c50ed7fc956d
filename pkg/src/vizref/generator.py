"""Synthetic dialogue corpus generator.

Emits think-aloud/request/think-aloud shaped sessions over the bundled
ontology with gold labels by construction: IOB2 reference tags, slot
fillers, intent, gesture events (on a configurable fraction of references),
referent ids, and created visualization specs. Output is bit-stable for a
given seed.

Gold plot types carry deliberate label noise (a user sometimes wants bars
for a time series or a heat map without saying "map"), so rule-based plot
inference scores below 100% with bar charts easiest and heat maps hardest,
mirroring how the request phrasing under-determines the chart kind.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .corpus import CorpusRecord, GoldFiller, GoldSpec, validate_corpus
from .dialogue import Entity, merge_entities
from .ontology import KnowledgeOntology
from .semantics import SlotFiller
from .text import pos_tag


@dataclass
class GeneratorConfig:
    cars_range: tuple[int, int] = (16, 20)
    setup_range: tuple[int, int] = (3, 8)
    conclusion_range: tuple[int, int] = (2, 4)
    gesture_rate: float = 1 / 3
    setup_reference_rate: float = 0.09
    request_mix: tuple[float, float, float] = (0.55, 0.25, 0.20)  # create, modify, winmgmt
    crowded_screen: int = 7  # close bias threshold, keeps the wall realistic


_POOLS = {
    "CRIME_TYPE": ["theft", "battery", "assault", "robbery", "burglary", "vandalism", "arson"],
    "NEIGHBORHOOD": ["downtown", "uptown", "lakeview", "riverside", "midtown", "chinatown",
                     "oldtown", "pilsen", "englewood"],
    "LOCATION_TYPE": ["park", "school", "bar", "store", "apartment", "garage"],
    "WEAPON": ["gun", "knife"],
    "STREET": ["michigan", "halsted", "ashland", "damen"],
    "MONTH_VALUES": ["january", "march", "june", "july", "september", "november"],
    "DAY_VALUES": ["monday", "wednesday", "friday", "saturday", "sunday"],
    "TIME_VALUES": ["morning", "evening", "night"],
}

# (phrase, slot, canonical value) for grouping expressions
_TEMPORAL_PHRASES = [
    ("month", "MONTH", "month"),
    ("months", "MONTH", "months"),
    ("months of the year", "MONTH", "months"),
    ("month of year", "MONTH", "month"),
    ("year", "YEAR", "year"),
    ("week", "DAY", "week"),
    ("day of the week", "DAY", "day"),
    ("day of week", "DAY", "day"),
    ("season", "SEASON", "season"),
]

_REF_PHRASES = ["this graph", "that graph", "this chart", "that chart",
                "this one", "that one", "that visualization", "this plot"]

_PREFIXES = ["", "ok", "alright", "now", "so"]


class _Utterance:
    """Token accumulator tracking gold filler spans and the reference span."""

    def __init__(self):
        self.words: list[str] = []
        self.fillers: list[GoldFiller] = []
        self.ref_span: tuple[int, int] | None = None

    def say(self, text: str) -> "_Utterance":
        if text:
            self.words.extend(text.split())
        return self

    def filler(self, text: str, slot: str, value: str) -> "_Utterance":
        begin = len(self.words)
        self.say(text)
        self.fillers.append(GoldFiller(begin, len(self.words), text, slot, value))
        return self

    def ref(self, text: str) -> "_Utterance":
        begin = len(self.words)
        self.say(text)
        self.ref_span = (begin, len(self.words))
        return self

    def tags(self) -> list[str]:
        tags = ["O"] * len(self.words)
        if self.ref_span is not None:
            b, e = self.ref_span
            tags[b] = "B-REF"
            for i in range(b + 1, e):
                tags[i] = "I-REF"
        return tags


@dataclass
class _GoldViz:
    id: str
    entities: list[Entity]
    plot_type: str


class _SessionBuilder:
    def __init__(self, session_id: str, rng: random.Random, ontology: KnowledgeOntology,
                 config: GeneratorConfig):
        self.sid = session_id
        self.rng = rng
        self.ontology = ontology
        self.config = config
        self.records: list[CorpusRecord] = []
        self.screen: list[_GoldViz] = []
        self.next_seq = 1
        self.turn = 0

    # -- helpers -----------------------------------------------------------

    def emit(self, utt: _Utterance, segment: str, intent: str, *, gesture: str | None = None,
             referent: str | None = None, new_spec: GoldSpec | None = None,
             win_op: str | None = None) -> None:
        tokens = list(utt.words)
        pos = [t.pos for t in pos_tag(tokens)]
        self.records.append(CorpusRecord(
            session_id=self.sid, turn_index=self.turn, segment=segment,
            tokens=tokens, pos=pos, tags=utt.tags(), intent=intent,
            gesture_target=gesture, fillers=list(utt.fillers), referent_id=referent,
            new_spec=new_spec, win_op=win_op))
        self.turn += 1

    def pick(self, pool: str) -> str:
        return self.rng.choice(_POOLS[pool])

    def pick_referent(self) -> _GoldViz:
        if len(self.screen) > 1 and self.rng.random() > 0.75:
            return self.rng.choice(self.screen[:-1])
        return self.screen[-1]

    def maybe_gesture(self) -> bool:
        return self.rng.random() < self.config.gesture_rate

    def ref_phrase(self, referent: _GoldViz) -> str:
        roll = self.rng.random()
        if roll < 0.30:
            values = [e.value for e in referent.entities
                      if e.value in _POOLS["CRIME_TYPE"] or e.value in _POOLS["NEIGHBORHOOD"]]
            if values:
                return f"the {self.rng.choice(values)} one"
        return self.rng.choice(_REF_PHRASES)

    def allocate(self) -> str:
        spec_id = f"{self.next_seq:02d}"
        self.next_seq += 1
        return spec_id

    def gold_entities(self, fillers: list[GoldFiller],
                      referent: _GoldViz | None) -> list[Entity]:
        as_fillers = [SlotFiller(f.begin, f.end, f.surface, f.slot, 1.0, f.value)
                      for f in fillers]
        base = referent.entities if referent else []
        return merge_entities(as_fillers, base, self.ontology)

    # -- think-aloud -------------------------------------------------------

    def setup_row(self, allow_reference: bool) -> None:
        rng = self.rng
        if allow_reference and self.screen and rng.random() < self.config.setup_reference_rate:
            referent = self.pick_referent()
            utt = _Utterance()
            variant = rng.random()
            if variant < 0.3:
                utt.ref(self.ref_phrase(referent)).say("looks interesting")
            elif variant < 0.5:
                utt.ref(self.ref_phrase(referent)).say("is pretty crowded")
            elif variant < 0.7:
                utt.say("i like").ref(self.ref_phrase(referent))
            elif variant < 0.8:
                utt.say("the pattern in").ref(self.ref_phrase(referent)).say("is clearer now")
            elif variant < 0.9:
                utt.say("this pattern in").ref(self.ref_phrase(referent)).say("looks strange")
            else:
                utt.ref(self.ref_phrase(referent)).say("makes this easier")
            gesture = referent.id if self.maybe_gesture() else None
            self.emit(utt, "setup", "OBSERVATION", gesture=gesture, referent=referent.id)
            return
        choice = rng.randrange(9)
        utt = _Utterance()
        if choice == 0:
            crime = self.pick("CRIME_TYPE")
            utt.say("i think").filler(crime, "CRIME_TYPE", crime).say("is")
            utt.say(rng.choice(["higher", "lower", "steady"])).say("lately")
        elif choice == 1:
            crime = self.pick("CRIME_TYPE")
            when = self.pick("TIME_VALUES")
            utt.say("there is more").filler(crime, "CRIME_TYPE", crime)
            utt.say("at").filler(when, "TIME_OF_DAY", when)
        elif choice == 2:
            crime = self.pick("CRIME_TYPE")
            month = self.pick("MONTH_VALUES")
            utt.filler(crime, "CRIME_TYPE", crime).say("seems higher in")
            utt.filler(month, "MONTH", month)
        elif choice == 3:
            utt.say("interesting pattern here")
        elif choice == 4:
            utt.say("i want to find the worst areas")
        elif choice == 5:
            utt.say("the pattern is clearer now")
        elif choice == 6:
            utt.say(rng.choice(["graphs help me see trends", "charts make this easier"]))
        elif choice == 7:
            nbhd = self.pick("NEIGHBORHOOD")
            utt.say("let me think about").filler(nbhd, "NEIGHBORHOOD", nbhd)
        else:
            utt.say(rng.choice(["hmm let me look again", "this pattern is strange",
                                "okay moving on"]))
        self.emit(utt, "setup", "OBSERVATION")

    def conclusion_row(self) -> None:
        rng = self.rng
        choice = rng.randrange(6)
        utt = _Utterance()
        if choice == 0:
            utt.say("okay makes sense now")
        elif choice == 1:
            crime = self.pick("CRIME_TYPE")
            day = self.pick("DAY_VALUES")
            utt.say("so").filler(crime, "CRIME_TYPE", crime).say("peaks on")
            utt.filler(day, "DAY", day)
        elif choice == 2:
            utt.say("got it")
        elif choice == 3:
            # bare discourse-deictic "that": genuinely ambiguous with deixis
            utt.say(rng.choice(["very useful to know", "that is useful"]))
        elif choice == 4:
            month = self.pick("MONTH_VALUES")
            utt.say("i see a spike in").filler(month, "MONTH", month)
        else:
            nbhd = self.pick("NEIGHBORHOOD")
            utt.say("we should focus on").filler(nbhd, "NEIGHBORHOOD", nbhd)
        self.emit(utt, "conclusion", "OBSERVATION")

    # -- requests ----------------------------------------------------------

    def _prefix(self, utt: _Utterance) -> _Utterance:
        word = self.rng.choice(_PREFIXES)
        return utt.say(word)

    _CREATE_PATTERNS = ["nbhd_area", "nbhd_in", "plain", "loctype", "weapon",
                        "temporal", "temporal_nbhd", "cue", "spatial", "spatial_temporal"]
    _CREATE_WEIGHTS = [0.12, 0.25, 0.12, 0.08, 0.05, 0.15, 0.04, 0.08, 0.05, 0.06]

    def create_request(self) -> None:
        rng = self.rng
        utt = _Utterance()
        self._prefix(utt)
        crime = self.pick("CRIME_TYPE")
        pattern = rng.choices(self._CREATE_PATTERNS, weights=self._CREATE_WEIGHTS)[0]
        cue = spatial = temporal = False
        if pattern == "nbhd_area":
            nbhd = self.pick("NEIGHBORHOOD")
            utt.say("can i see").filler(crime, "CRIME_TYPE", crime)
            utt.say("in the").filler(nbhd, "NEIGHBORHOOD", nbhd).say("area")
        elif pattern == "nbhd_in":
            nbhd = self.pick("NEIGHBORHOOD")
            utt.say("show me").filler(crime, "CRIME_TYPE", crime)
            utt.say("in").filler(nbhd, "NEIGHBORHOOD", nbhd)
        elif pattern == "plain":
            utt.say("show me").filler(crime, "CRIME_TYPE", crime)
        elif pattern == "loctype":
            loc = self.pick("LOCATION_TYPE")
            utt.say("can i see").filler(crime, "CRIME_TYPE", crime)
            utt.say("near a").filler(loc, "LOCATION_TYPE", loc)
        elif pattern == "weapon":
            weapon = self.pick("WEAPON")
            utt.say("show me").filler(crime, "CRIME_TYPE", crime)
            utt.say("with a").filler(weapon, "WEAPON", weapon)
        elif pattern == "temporal":
            temporal = True
            phrase, slot, value = rng.choice(_TEMPORAL_PHRASES)
            verb = rng.choice(["can you show", "ok let's have a look at", "could you display"])
            utt.say(verb).filler(crime, "CRIME_TYPE", crime)
            utt.say("by").filler(phrase, slot, value)
        elif pattern == "temporal_nbhd":
            temporal = True
            phrase, slot, value = rng.choice(_TEMPORAL_PHRASES)
            utt.say("could you display").filler(crime, "CRIME_TYPE", crime)
            nbhd = self.pick("NEIGHBORHOOD")
            utt.say("in").filler(nbhd, "NEIGHBORHOOD", nbhd).say("by").filler(phrase, slot, value)
        elif pattern == "cue":
            cue = True
            nbhd = self.pick("NEIGHBORHOOD")
            if rng.random() < 0.5:
                utt.say("can i see a heat map of").filler(crime, "CRIME_TYPE", crime)
                utt.say("in").filler(nbhd, "NEIGHBORHOOD", nbhd)
            else:
                utt.say("show").filler(crime, "CRIME_TYPE", crime).say("on a map")
        elif pattern == "spatial":
            spatial = True
            street = self.pick("STREET")
            utt.say("can you show").filler(crime, "CRIME_TYPE", crime)
            utt.say("on").filler(street, "STREET", street).say("street")
        else:  # spatial_temporal: the chart kind is genuinely ambiguous
            phrase, slot, value = rng.choice(_TEMPORAL_PHRASES)
            street = self.pick("STREET")
            utt.say("can you show").filler(crime, "CRIME_TYPE", crime)
            utt.say("on").filler(street, "STREET", street).say("street by")
            utt.filler(phrase, slot, value)

        entities = self.gold_entities(utt.fillers, None)
        if cue:
            plot = "heatmap"
        elif pattern == "spatial_temporal":
            plot = "heatmap" if rng.random() < 0.5 else "line"
        elif temporal:
            plot = "line" if rng.random() < 0.85 else "bar"
        elif spatial:
            plot = "heatmap" if rng.random() < 0.70 else "bar"
        else:
            plot = "bar" if rng.random() < 0.94 else "heatmap"
        viz = _GoldViz(self.allocate(), entities, plot)
        self.screen.append(viz)
        spec = GoldSpec(viz.id, plot, [e.to_payload() for e in entities],
                        " / ".join(e.value or e.slot for e in entities))
        self.emit(utt, "request", "CREATEVIS", new_spec=spec)

    def modify_request(self) -> None:
        rng = self.rng
        referent = self.pick_referent()
        utt = _Utterance()
        self._prefix(utt)
        phrase = self.ref_phrase(referent)
        pattern = rng.choices(["temporal", "break", "crime", "nbhd", "verbatim"],
                              weights=[0.20, 0.07, 0.33, 0.32, 0.08])[0]
        if pattern == "temporal":
            verb = rng.choice(["can you show", "now show", "show"])
            t_phrase, slot, value = rng.choice(_TEMPORAL_PHRASES)
            utt.say(verb).ref(phrase).say("by").filler(t_phrase, slot, value)
        elif pattern == "break":
            t_phrase, slot, value = rng.choice(_TEMPORAL_PHRASES)
            utt.say("can you break").ref(phrase).say("down by").filler(t_phrase, slot, value)
        elif pattern == "crime":
            crime = self.pick("CRIME_TYPE")
            utt.say("show").ref(phrase).say("for").filler(crime, "CRIME_TYPE", crime).say("instead")
        elif pattern == "nbhd":
            nbhd = self.pick("NEIGHBORHOOD")
            if rng.random() < 0.5:
                utt.say("can you show").ref(phrase).say("for").filler(nbhd, "NEIGHBORHOOD", nbhd)
            else:
                utt.say("can you show").ref(phrase)
                utt.say("for the").filler(nbhd, "NEIGHBORHOOD", nbhd).say("area")
        else:
            t_phrase, slot, value = rng.choice([t for t in _TEMPORAL_PHRASES if " " in t[0]])
            utt.say("ok let's have a look at can you have").ref(phrase)
            utt.say("for").filler(t_phrase, slot, value)

        entities = self.gold_entities(utt.fillers, referent)
        kinds = {self.ontology.kind_of(e.slot) for e in entities}
        rule_plot = "line" if "temporal" in kinds else (
            "heatmap" if "spatial" in kinds else "bar")
        flip_rate = 0.15 if rule_plot == "bar" else 0.08
        plot = rule_plot if rng.random() > flip_rate else ("bar" if rule_plot != "bar" else "line")
        viz = _GoldViz(self.allocate(), entities, plot)
        self.screen.append(viz)
        spec = GoldSpec(viz.id, plot, [e.to_payload() for e in entities],
                        " / ".join(e.value or e.slot for e in entities))
        gesture = referent.id if self.maybe_gesture() else None
        self.emit(utt, "request", "MODIFYVIS", gesture=gesture, referent=referent.id,
                  new_spec=spec)

    def winmgmt_request(self) -> None:
        rng = self.rng
        referent = self.pick_referent()
        op = rng.choices(["close", "maximize", "minimize", "move"],
                         weights=[0.6, 0.15, 0.1, 0.15])[0]
        utt = _Utterance()
        style = rng.random()
        if style < 0.10:
            utt.say(op).ref(rng.choice(["that", "this"]))
        elif style < 0.55:
            utt.say("can you").say(op).ref(self.ref_phrase(referent))
        else:
            utt.say(op).ref(self.ref_phrase(referent))
            if op == "move":
                utt.say("to the left")
            if rng.random() < 0.3:
                utt.say("please")
        gesture = referent.id if self.maybe_gesture() else None
        if op == "close":
            self.screen = [v for v in self.screen if v.id != referent.id]
        self.emit(utt, "request", "WINMGMT", gesture=gesture, referent=referent.id,
                  win_op=op)

    # -- session assembly ---------------------------------------------------

    def build(self) -> list[CorpusRecord]:
        rng = self.rng
        greeting = _Utterance().say("hello i am ready to start")
        self.emit(greeting, "setup", "GREETING")
        n_cars = rng.randint(*self.config.cars_range)
        for _ in range(n_cars):
            for _ in range(rng.randint(*self.config.setup_range)):
                self.setup_row(allow_reference=True)
            w_create, w_modify, w_win = self.config.request_mix
            if not self.screen:
                kind = "create"
            elif len(self.screen) >= self.config.crowded_screen:
                kind = rng.choices(["create", "modify", "winmgmt"],
                                   weights=[0.15, 0.25, 0.60])[0]
            else:
                kind = rng.choices(["create", "modify", "winmgmt"],
                                   weights=[w_create, w_modify, w_win])[0]
            if kind == "create":
                self.create_request()
            elif kind == "modify":
                self.modify_request()
            else:
                self.winmgmt_request()
            for _ in range(rng.randint(*self.config.conclusion_range)):
                self.conclusion_row()
        return self.records


def generate_synthetic_corpus(seed: int, sessions: int, ontology: KnowledgeOntology,
                              config: GeneratorConfig | None = None) -> list[CorpusRecord]:
    """Deterministic template-grammar corpus; validated before returning."""
    config = config or GeneratorConfig()
    _check_pools(ontology)
    records: list[CorpusRecord] = []
    for s in range(sessions):
        rng = random.Random(seed * 1_000_003 + s)
        builder = _SessionBuilder(f"s{s:02d}", rng, ontology, config)
        records.extend(builder.build())
    validate_corpus(records)
    return records


def _check_pools(ontology: KnowledgeOntology) -> None:
    slot_terms = {slot.name: set(slot.terms) for slot in ontology.slots}
    for pool, slot in (("CRIME_TYPE", "CRIME_TYPE"), ("NEIGHBORHOOD", "NEIGHBORHOOD"),
                       ("LOCATION_TYPE", "LOCATION_TYPE"), ("WEAPON", "WEAPON"),
                       ("STREET", "STREET"), ("MONTH_VALUES", "MONTH"),
                       ("DAY_VALUES", "DAY"), ("TIME_VALUES", "TIME_OF_DAY")):
        missing = [t for t in _POOLS[pool] if t not in slot_terms.get(slot, set())]
        if missing:
            raise ValueError(f"generator pool {pool} has terms missing from ontology: {missing}")
    for phrase, slot, value in _TEMPORAL_PHRASES:
        if value not in slot_terms.get(slot, set()):
            raise ValueError(f"temporal phrase value {value!r} missing from slot {slot}")
