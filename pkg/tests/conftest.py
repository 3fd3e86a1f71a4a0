import pathlib

import pytest

import stackgame as sg

ROOT = pathlib.Path(__file__).resolve().parents[1]
SCENARIO_PATH = ROOT / "scenarios" / "paper_default"


@pytest.fixture(scope="session")
def scenario_path() -> pathlib.Path:
    return SCENARIO_PATH


@pytest.fixture(scope="session")
def default_config() -> sg.CheckedScenario:
    return sg.validate(sg.load_scenario_file(SCENARIO_PATH))
