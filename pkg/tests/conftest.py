import pytest

from carenets.scenario import compile_scenario, load_scenario

from helpers import ACUTE, CHRONIC


@pytest.fixture(scope="session")
def acute_doc():
    return load_scenario(ACUTE)


@pytest.fixture(scope="session")
def chronic_doc():
    return load_scenario(CHRONIC)


@pytest.fixture(scope="session")
def acute(acute_doc):
    return compile_scenario(acute_doc)


@pytest.fixture(scope="session")
def chronic(chronic_doc):
    return compile_scenario(chronic_doc)
