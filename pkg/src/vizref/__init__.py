"""Multimodal reference resolution for large-screen visualization dialogue.

The package tracks an information state of on-screen visualizations,
detects referring expressions in user text with a linear-chain CRF, scores
referents with recency-weighted cosine similarity over an 11-dimensional
slot space, and establishes new visualization specifications from
under-specified requests.
"""
from .crf import CrfTagger
from .dialogue import (DialogueEngine, DialogueHistory, EngineConfig, SessionState,
                       recency_weights, resolve_reference)
from .metrics import span_f1
from .ontology import (EmbeddingLexicon, KnowledgeOntology, SlotSpace, embed_phrase,
                       load_embeddings, load_ontology)
from .queries import IncidentTable
from .semantics import SemanticVectorizer, SlotFiller, vectorize

__version__ = "0.1.0"

__all__ = [
    "CrfTagger",
    "DialogueEngine",
    "DialogueHistory",
    "EmbeddingLexicon",
    "EngineConfig",
    "IncidentTable",
    "KnowledgeOntology",
    "SemanticVectorizer",
    "SessionState",
    "SlotFiller",
    "SlotSpace",
    "embed_phrase",
    "load_embeddings",
    "load_ontology",
    "recency_weights",
    "resolve_reference",
    "span_f1",
    "vectorize",
    "__version__",
]
