import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "deltawave", deadline=None, max_examples=25,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("deltawave")

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(ACCEPTANCE[key])


import pytest  # noqa: E402


@pytest.fixture
def acceptance(request):
    """Record one criterion's outcome: ``acceptance(key, ok, detail)``."""

    def record(key, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {key}: {detail}"
        ACCEPTANCE[key] = line
        print(line)
        return ok

    return record
