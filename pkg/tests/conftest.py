from pathlib import Path

import pytest

from dali import load_agent_file

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIOS


@pytest.fixture(scope="session")
def scenario():
    def load(name: str):
        return load_agent_file(SCENARIOS / f"{name}.dali")

    return load
