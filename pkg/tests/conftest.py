import pytest

from codemix.preprocess import default_lexicon


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()
