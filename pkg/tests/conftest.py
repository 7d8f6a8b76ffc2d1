import pytest
from hypothesis import HealthCheck, settings

from lucent.fixtures import n1, n2, n3

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def N1():
    return n1()


@pytest.fixture
def N2():
    return n2()


@pytest.fixture
def N3():
    return n3()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(mod._line(n, ok, detail))
