import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bpk import bernstein as bc

settings.register_profile("bpk", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("bpk")


@pytest.fixture(scope="session")
def stable_half():
    return bc.make_stable(0.5)


@pytest.fixture(scope="session")
def gamma1():
    return bc.make_gamma()


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    try:
        import test_acceptance
    except ImportError:
        return
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[n])
