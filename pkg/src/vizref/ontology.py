"""Knowledge ontology, embedding lexicon, and the slot similarity space.

The ontology fixes 11 parent slots (data attributes) in a stable order; that
order defines the dimensions of every semantic vector in the system. Each
slot carries a term list, and a slot prototype is the unit-normalized mean
of its in-vocabulary term embeddings. Phrases are matched to slots by cosine
similarity against the prototypes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmbeddingFormatError, OntologyCardinalityError, OntologySchemaError

SLOT_COUNT = 11
SLOT_KINDS = ("temporal", "categorical", "spatial")
DEFAULT_SLOT_THRESHOLD = 0.35

_DATA_DIR = Path(__file__).parent / "data"
DEFAULT_ONTOLOGY_PATH = _DATA_DIR / "ontology.json"
DEFAULT_EMBEDDINGS_PATH = _DATA_DIR / "embeddings.txt"


@dataclass(frozen=True)
class ParentSlot:
    name: str
    kind: str
    terms: tuple[str, ...]


@dataclass(frozen=True)
class KnowledgeOntology:
    slots: tuple[ParentSlot, ...]
    _term_to_slot: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        mapping = {}
        for slot in self.slots:
            for term in slot.terms:
                mapping[term] = slot.name
        object.__setattr__(self, "_term_to_slot", mapping)

    @property
    def slot_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.slots)

    def index_of(self, slot_name: str) -> int:
        return self.slot_names.index(slot_name)

    def kind_of(self, slot_name: str) -> str:
        return self.slots[self.index_of(slot_name)].kind

    def slot(self, slot_name: str) -> ParentSlot:
        return self.slots[self.index_of(slot_name)]

    def slot_of_term(self, term: str) -> str | None:
        return self._term_to_slot.get(term)


def load_ontology(path: str | Path = DEFAULT_ONTOLOGY_PATH) -> KnowledgeOntology:
    """Load and validate an ontology file.

    The file is a UTF-8 JSON object with a top-level ``slots`` array; each
    entry has ``name`` (uppercase identifier), ``kind`` (temporal,
    categorical or spatial) and ``terms`` (non-empty lowercase strings).
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise OntologySchemaError(f"cannot parse ontology file {path}: {exc}") from exc
    if not isinstance(raw, dict) or "slots" not in raw:
        raise OntologySchemaError("missing top-level array", field="slots")
    entries = raw["slots"]
    if not isinstance(entries, list):
        raise OntologySchemaError("must be an array", field="slots")
    if len(entries) != SLOT_COUNT:
        raise OntologyCardinalityError(f"expected exactly {SLOT_COUNT} parent slots, found {len(entries)}")

    slots = []
    seen_names: set[str] = set()
    seen_terms: dict[str, str] = {}
    for i, entry in enumerate(entries):
        for key in ("name", "kind", "terms"):
            if not isinstance(entry, dict) or key not in entry:
                raise OntologySchemaError(f"slot entry {i} is incomplete", field=key)
        name, kind, terms = entry["name"], entry["kind"], entry["terms"]
        if not isinstance(name, str) or not name or name != name.upper():
            raise OntologySchemaError(f"slot entry {i}: name must be a non-empty uppercase string", field="name")
        if name in seen_names:
            raise OntologySchemaError(f"duplicate slot name {name}", field="name")
        seen_names.add(name)
        if kind not in SLOT_KINDS:
            raise OntologySchemaError(f"slot {name}: kind must be one of {SLOT_KINDS}", field="kind")
        if not isinstance(terms, list) or not terms:
            raise OntologySchemaError(f"slot {name}: terms must be a non-empty array", field="terms")
        for term in terms:
            if not isinstance(term, str) or not term or term != term.lower():
                raise OntologySchemaError(f"slot {name}: term {term!r} must be a non-empty lowercase string",
                                          field="terms")
            if term in seen_terms:
                raise OntologySchemaError(
                    f"term {term!r} appears under both {seen_terms[term]} and {name}", field="terms")
            seen_terms[term] = name
        slots.append(ParentSlot(name=name, kind=kind, terms=tuple(terms)))

    kinds = {s.kind for s in slots}
    if "temporal" not in kinds:
        raise OntologySchemaError("at least one slot must have kind temporal", field="kind")
    if "spatial" not in kinds:
        raise OntologySchemaError("at least one slot must have kind spatial", field="kind")
    return KnowledgeOntology(slots=tuple(slots))


@dataclass(frozen=True)
class EmbeddingLexicon:
    dimension: int
    entries: dict

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, word: str):
        return self.entries.get(word)


def load_embeddings(path: str | Path = DEFAULT_EMBEDDINGS_PATH) -> EmbeddingLexicon:
    """Load a plain-text embedding file: ``word v1 v2 ... vD`` per line, no header."""
    entries: dict[str, np.ndarray] = {}
    dimension = None
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            word, values = parts[0].lower(), parts[1:]
            if dimension is None:
                if not values:
                    raise EmbeddingFormatError("entry has no vector components", line_no)
                dimension = len(values)
            if len(values) != dimension:
                raise EmbeddingFormatError(
                    f"expected {dimension} components, found {len(values)}", line_no)
            try:
                vec = np.array([float(v) for v in values], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingFormatError(str(exc), line_no) from exc
            entries[word] = vec
    if not entries:
        raise EmbeddingFormatError("embedding file contains no entries")
    return EmbeddingLexicon(dimension=dimension, entries=entries)


def embed_phrase(words, lexicon: EmbeddingLexicon) -> np.ndarray:
    """Unit-normalized mean of the in-vocabulary word vectors.

    A phrase with no in-vocabulary words maps to the zero vector, which can
    never win a non-negative threshold comparison.
    """
    vecs = [lexicon.entries[w.lower()] for w in words if w.lower() in lexicon.entries]
    if not vecs:
        return np.zeros(lexicon.dimension)
    mean = np.mean(vecs, axis=0)
    norm = float(np.linalg.norm(mean))
    if norm == 0.0:
        return np.zeros(lexicon.dimension)
    return mean / norm


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, defined as 0.0 when either vector is zero."""
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


class SlotSpace:
    """Ontology + lexicon + slot prototypes, immutable after construction.

    Prototype i is the unit-normalized mean of the embeddings of slot i's
    in-vocabulary terms (multi-word terms are embedded as phrases). Safe for
    concurrent reads.
    """

    def __init__(self, ontology: KnowledgeOntology, lexicon: EmbeddingLexicon,
                 threshold: float = DEFAULT_SLOT_THRESHOLD,
                 exclude_terms: frozenset[str] = frozenset()):
        self.ontology = ontology
        self.lexicon = lexicon
        self.threshold = threshold
        rows = []
        for slot in ontology.slots:
            term_vecs = []
            for term in slot.terms:
                if term in exclude_terms:
                    continue
                vec = embed_phrase(term.split(), lexicon)
                if np.any(vec):
                    term_vecs.append(vec)
            if term_vecs:
                mean = np.mean(term_vecs, axis=0)
                norm = float(np.linalg.norm(mean))
                rows.append(mean / norm if norm else np.zeros(lexicon.dimension))
            else:
                rows.append(np.zeros(lexicon.dimension))
        self.prototypes = np.array(rows)
        self.prototypes.setflags(write=False)

    @property
    def slot_names(self) -> tuple[str, ...]:
        return self.ontology.slot_names

    def embed(self, words) -> np.ndarray:
        return embed_phrase(words, self.lexicon)

    def prototype(self, slot_name: str) -> np.ndarray:
        return self.prototypes[self.ontology.index_of(slot_name)]

    def prototype_similarities(self, phrase_vector: np.ndarray) -> np.ndarray:
        """Cosine of a phrase vector against all 11 prototypes, in slot order."""
        return np.array([cosine(row, phrase_vector) for row in self.prototypes])

    def nearest_slot(self, words, threshold: float | None = None) -> tuple[str, float] | None:
        """Best-matching slot for a phrase, or None below threshold / zero phrase.

        Ties break toward the earlier slot in ontology order.
        """
        thr = self.threshold if threshold is None else threshold
        vec = self.embed(words)
        if not np.any(vec):
            return None
        sims = self.prototype_similarities(vec)
        best = int(np.argmax(sims))
        score = float(sims[best])
        if score >= thr:
            return self.ontology.slot_names[best], score
        return None


def nearest_slot(words, ontology: KnowledgeOntology, lexicon: EmbeddingLexicon,
                 threshold: float = DEFAULT_SLOT_THRESHOLD) -> tuple[str, float] | None:
    """Convenience wrapper constructing a throwaway SlotSpace; prefer SlotSpace."""
    return SlotSpace(ontology, lexicon, threshold).nearest_slot(words)
