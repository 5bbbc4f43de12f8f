import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def delta24():
    from paramodular.siegel import build_delta1
    return build_delta1(24)


@pytest.fixture(scope="session")
def delta96():
    from paramodular.siegel import build_delta1
    return build_delta1(96)


@pytest.fixture(scope="session")
def cube96(delta96):
    from paramodular.siegel import series_power
    return series_power(delta96, 3)
