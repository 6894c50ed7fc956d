import pytest
from hypothesis import HealthCheck, settings

from vizref.crf import CrfTagger
from vizref.dialogue import DialogueEngine
from vizref.generator import generate_synthetic_corpus
from vizref.ontology import SlotSpace, load_embeddings, load_ontology
from vizref.queries import IncidentTable

settings.register_profile(
    "suite", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("suite")

FIXTURE_SEED = 7
FIXTURE_SESSIONS = 16


@pytest.fixture(scope="session")
def ontology():
    return load_ontology()


@pytest.fixture(scope="session")
def lexicon():
    return load_embeddings()


@pytest.fixture(scope="session")
def space(ontology, lexicon):
    return SlotSpace(ontology, lexicon)


@pytest.fixture(scope="session")
def table():
    return IncidentTable.load()


@pytest.fixture(scope="session")
def corpus(ontology):
    return generate_synthetic_corpus(FIXTURE_SEED, FIXTURE_SESSIONS, ontology)


@pytest.fixture(scope="session")
def tagger(corpus):
    model = CrfTagger()
    model.fit([r.token_objects() for r in corpus], [r.tags for r in corpus])
    return model


@pytest.fixture(scope="session")
def engine(space, table, tagger):
    return DialogueEngine(space, table, tagger=tagger)
