from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def fixture_path():
    def resolve(name: str) -> str:
        return str(FIXTURES / name)

    return resolve
