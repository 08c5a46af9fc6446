import pytest

from taxonomist.fixtures import (
    fruit_corpus,
    fruit_golden,
    fruit_profile,
    fruit_prompt,
    fruit_schema,
)
from taxonomist.gateway import BackendConfig


@pytest.fixture(scope="session")
def schema():
    return fruit_schema()


@pytest.fixture(scope="session")
def corpus():
    return fruit_corpus(n=200, seed=7)


@pytest.fixture(scope="session")
def golden():
    return fruit_golden()


@pytest.fixture(scope="session")
def spec(schema):
    return fruit_prompt(schema)


@pytest.fixture
def mock_config():
    return BackendConfig(kind="mock", mock_profile=fruit_profile())
