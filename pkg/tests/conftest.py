import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixture_text():
    def load(name: str) -> str:
        return (FIXTURES / name).read_text()

    return load


@pytest.fixture
def fixture_spec(fixture_text):
    from gr1diag import parse_spec

    def load(name: str):
        return parse_spec(fixture_text(name))

    return load
