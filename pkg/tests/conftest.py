import json
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

GOLDEN = json.loads((Path(__file__).parent / "golden" / "golden.json").read_text())


@pytest.fixture(scope="session")
def golden():
    return GOLDEN


def pytest_terminal_summary(terminalreporter):
    module = next((m for name, m in sys.modules.items() if name.endswith("test_acceptance")), None)
    rows = getattr(module, "RESULTS", [])
    if rows:
        terminalreporter.section("acceptance criteria")
        for i, passed, detail in sorted(rows):
            terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {i}: {detail}")
