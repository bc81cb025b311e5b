import os
import sys

import pytest

# Add src directory to Python path to allow for module imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../src")))

from modules.engine import IntegrationConfig, evolve_no_tick  # noqa: E402
from modules.models import (  # noqa: E402
    LadderParams,
    build_cascade_clock,
    build_exponential_clock,
    build_ladder_clock,
    build_rabi_clock,
)

RUN_SLOW = os.environ.get("TICKBOUND_SLOW") == "1"


def pytest_collection_modifyitems(config, items):
    """Skip Monte Carlo and long ladder runs unless TICKBOUND_SLOW=1"""
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="set TICKBOUND_SLOW=1 to run slow tests")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(scope="session")
def config():
    """Shipped integrator defaults, independent of local settings files"""
    return IntegrationConfig()


@pytest.fixture(scope="session")
def exponential_model():
    return build_exponential_clock(1.0)


@pytest.fixture(scope="session")
def dark_model():
    """Exponential clock started in the ground state: nothing ever ticks"""
    model = build_exponential_clock(1.0)
    return model.with_initial_state([[1.0, 0.0], [0.0, 0.0]])


@pytest.fixture(scope="session")
def rabi_model():
    return build_rabi_clock(5.0, 1.0)


@pytest.fixture(scope="session")
def cascade_model():
    return build_cascade_clock(1.0, 2)


@pytest.fixture(scope="session")
def ladder_model():
    return build_ladder_clock(LadderParams.default())


@pytest.fixture(scope="session")
def exponential_evolution(exponential_model, config):
    return evolve_no_tick(exponential_model, config)


@pytest.fixture(scope="session")
def rabi_evolution(rabi_model, config):
    return evolve_no_tick(rabi_model, config)


@pytest.fixture(scope="session")
def cascade_evolution(cascade_model, config):
    return evolve_no_tick(cascade_model, config)


@pytest.fixture(scope="session")
def ladder_evolution(ladder_model, config):
    return evolve_no_tick(ladder_model, config)
