from pathlib import Path

import pytest

from w6hea.repofmt import SourceDocument, parse_repository

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_path(name: str) -> Path:
    return FIXTURES / name


def load_fixture_repo(*names: str):
    docs = [SourceDocument.read(fixture_path(n)) for n in names]
    repo, diagnostics = parse_repository(docs)
    assert repo is not None, [str(d) for d in diagnostics]
    return repo


@pytest.fixture
def compliant_repo():
    return load_fixture_repo("compliant.ea.yaml")


@pytest.fixture
def violations_repo():
    return load_fixture_repo("violations.ea.yaml")


@pytest.fixture
def paper_table_repo():
    return load_fixture_repo("paper_api_table.ea.yaml")
