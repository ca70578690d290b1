from pathlib import Path

import pytest

DATA_DIR = Path(__file__).parent / "data"
TINY_MODEL = DATA_DIR / "tiny-mlm"


@pytest.fixture(scope="session")
def tiny_model() -> str:
    return str(TINY_MODEL)


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR
