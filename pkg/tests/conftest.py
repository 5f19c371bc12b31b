import os

import pytest
from hypothesis import HealthCheck, settings

from cantordyn import fixtures

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_MAX_EXAMPLES", "60")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("default")

# filled by test_acceptance; printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(scope="session")
def airplane():
    return fixtures.load("airplane_folding")


@pytest.fixture(scope="session")
def two_children():
    return fixtures.load("two_children")


@pytest.fixture(scope="session")
def two_cycle():
    return fixtures.load("two_cycle")


@pytest.fixture(scope="session")
def apply2_spec():
    return fixtures.load("apply2_deg2")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
