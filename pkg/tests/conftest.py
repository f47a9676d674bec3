import pytest

from firebreak_opt.fire_engine import SpreadParams, WeatherRecord
from firebreak_opt.landscape import synthetic_landscape


@pytest.fixture(scope="session")
def fixture100():
    """The canonical desk-scale fixture: 100x100 homogeneous, p=0.40."""
    return synthetic_landscape(100, 100, 0.40)


@pytest.fixture(scope="session")
def grid5():
    """5x5 deterministic-spread fixture (p=1.0)."""
    return synthetic_landscape(5, 5, 1.0)


@pytest.fixture(scope="session")
def default_params():
    return SpreadParams()


@pytest.fixture
def calm_weather():
    return WeatherRecord(wind_direction="N", wind_speed=0.0)
