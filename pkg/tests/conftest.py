from __future__ import annotations

import json
from pathlib import Path

import pytest

from ivy.parser import parse_model

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str):
    return parse_model((FIXTURES / name).read_text(encoding="utf-8"))


def fixture_json(name: str) -> dict:
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def river_model():
    return load_fixture("river.tmk.json")


@pytest.fixture(scope="session")
def river_unsafe_model():
    return load_fixture("river-unsafe.tmk.json")


@pytest.fixture(scope="session")
def minimal_model():
    return load_fixture("minimal.tmk.json")


@pytest.fixture(scope="session")
def hierarchy_model():
    return load_fixture("hierarchy.tmk.json")
