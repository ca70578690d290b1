import pytest

from pathlib import Path

from egsmooth import (
    Resources,
    build_all_indexes,
    load_embeddings,
    load_graph,
    load_lexdb,
)

DATA_DIR = Path(__file__).parent / "data"

BACKENDS = ("numba", "numpy")


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def fixture_graph():
    return load_graph(DATA_DIR / "fixture_graph.jsonl")


@pytest.fixture(scope="session")
def fixture_store():
    return load_embeddings(DATA_DIR / "fixture_embeddings.egm")


@pytest.fixture(scope="session")
def fixture_lexdb():
    return load_lexdb(DATA_DIR / "fixture_lexdb.jsonl")


@pytest.fixture(scope="session")
def fixture_indexes(fixture_graph, fixture_store):
    indexes, missing = build_all_indexes(fixture_graph, fixture_store)
    assert missing == {}
    return indexes


@pytest.fixture(scope="session")
def fixture_resources(fixture_graph, fixture_indexes, fixture_store, fixture_lexdb):
    return Resources(
        graph=fixture_graph,
        indexes=fixture_indexes,
        store=fixture_store,
        lexdb=fixture_lexdb,
    )
