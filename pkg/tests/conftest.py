import pytest

from kgqa import fixtures
from kgqa.decision.models import train
from kgqa.decision.synthetic import generate_dataset, train_test_split


@pytest.fixture(scope="session")
def fixture_kg():
    kg = fixtures.build_fixture_kg()
    kg.freeze()
    return kg


@pytest.fixture(scope="session")
def embeddings():
    return fixtures.fixture_embeddings()


@pytest.fixture(scope="session")
def sample_query():
    return fixtures.sample_query()


@pytest.fixture(scope="session")
def default_model():
    return fixtures.default_model()


@pytest.fixture(scope="session")
def synthetic_split():
    dataset = generate_dataset(n=600, seed=0)
    return train_test_split(dataset, test_fraction=0.3, seed=0)


@pytest.fixture(scope="session")
def trained_models(synthetic_split):
    train_set, _ = synthetic_split
    return {kind: train(train_set, kind, seed=0)
            for kind in ("mlp", "logistic", "gaussian-bayes")}
