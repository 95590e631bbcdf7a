import pytest

from qss.config import ScenarioConfig


@pytest.fixture
def experiment():
    return ScenarioConfig.experiment()


@pytest.fixture
def ideal():
    return ScenarioConfig.ideal()


@pytest.fixture
def classical():
    return ScenarioConfig.classical()
