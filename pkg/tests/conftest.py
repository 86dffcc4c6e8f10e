import pytest

from protorail import Engine, Store
from protorail.util import CLOCK_ENV

FIXED_TIME = "2026-03-01T09:00:00Z"


@pytest.fixture
def fixed_clock(monkeypatch):
    monkeypatch.setenv(CLOCK_ENV, FIXED_TIME)
    return FIXED_TIME


@pytest.fixture
def store(tmp_path):
    return Store(str(tmp_path / "store.jsonl"))


@pytest.fixture
def engine(store):
    return Engine(store)
