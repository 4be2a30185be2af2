import pytest

from imparse.fixtures import make_fixture_corpus, make_training_corpus


@pytest.fixture(scope="session")
def fixture_corpus():
    return make_fixture_corpus()


@pytest.fixture(scope="session")
def corpus_by_id(fixture_corpus):
    return {doc.id: doc for doc in fixture_corpus}


@pytest.fixture(scope="session")
def training_corpus():
    return make_training_corpus()
