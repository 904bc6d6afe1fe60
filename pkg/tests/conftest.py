import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("ci", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion."""

    def report(label: str, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
