from __future__ import annotations

from pathlib import Path

import pytest

from a2 import parse_case

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture(name: str):
    text = (FIXTURES / name).read_text(encoding="utf-8")
    result = parse_case(text, filename=str(FIXTURES / name))
    assert result.ok, [d.render() for d in result.diagnostics]
    return result.graph


def all_fixture_names() -> list:
    return sorted(p.name for p in FIXTURES.glob("*.a2"))


@pytest.fixture
def sound_case():
    return load_fixture("sound.a2")
