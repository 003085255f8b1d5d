import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("towerlab", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=40)
settings.load_profile("towerlab")


@pytest.fixture(scope="session")
def g243_5():
    from towerlab.catalog import get_entry

    return get_entry("243.5").group()


@pytest.fixture(scope="session")
def g243_7():
    from towerlab.catalog import get_entry

    return get_entry("243.7").group()
